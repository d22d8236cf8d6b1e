#![allow(dead_code)]

use finsler::flows::normal_vector;
use finsler::surface::FinslerSurface;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Initial data `(x₀, N₀)` near the middle of the chart, aimed back across
/// the centre so unit-length curves stay inside.
pub fn initial_conditions(surface: &FinslerSurface, n: usize, seed: u64) -> Vec<([f64; 2], [f64; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (b1, b2) = surface.chart.bounding_box();
    let centre = [0.5 * (b1[0] + b1[1]), 0.5 * (b2[0] + b2[1])];
    (0..n)
        .map(|_| {
            let x0 = surface.chart.sample(&mut rng, 0.6);
            let mut t = [centre[0] - x0[0], centre[1] - x0[1]];
            let len = t[0].hypot(t[1]).max(1e-3);
            let th: f64 = rng.gen_range(-0.6..0.6);
            t = [t[0] / len, t[1] / len];
            let t = [t[0] * th.cos() - t[1] * th.sin(), t[0] * th.sin() + t[1] * th.cos()];
            let t = surface.to_indicatrix(x0, t).unwrap();
            (x0, normal_vector(surface, x0, t).unwrap())
        })
        .collect()
}
