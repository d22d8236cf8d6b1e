use serde::Serialize;

use crate::engine::BundlePoint;
use crate::error::{GeometryError, Result};
use crate::frame::FrameJets;
use crate::geometry::fiber_gradient;
use crate::surface::FinslerSurface;

use super::SigmaState;

/// Curve data along a sampled lift `t ↦ (x(t), N(t))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagnosticSample {
    /// `ω¹(ż)`.
    pub sigma: f64,
    /// `−σ ω³(ż)`.
    pub k: f64,
    /// `−g_N(D_T N, T)` with the Chern covariant derivative, reference `N`.
    pub k_covariant: f64,
    pub b: f64,
    /// `(I₃ + 1) k − I₁ σ²`.
    pub el_residual: f64,
    /// `dI(ż) + ω³(ż)`.
    pub el_system_residual: f64,
    /// `|g_N(N, ẋ)| / F(x, ẋ)`.
    pub orth_drift: f64,
}

const CENTRAL5: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const EDGE5: [[f64; 5]; 2] = [[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0]];
const CENTRAL3: [f64; 3] = [-1.0, 0.0, 1.0];
const EDGE3: [f64; 3] = [-3.0, 4.0, -1.0];

/// Derivative of uniformly spaced samples: fourth-order five-point stencils
/// (one-sided near the ends), or second order when fewer than five samples
/// are available.
pub fn differentiate<const N: usize>(values: &[[f64; N]], h: f64) -> Result<Vec<[f64; N]>> {
    let n = values.len();
    if n < 3 {
        return Err(GeometryError::TooFewSamples { needed: 3, got: n });
    }
    let combine = |start: usize, weights: &[f64], scale: f64| -> [f64; N] {
        std::array::from_fn(|c| {
            weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * values[start + k][c])
                .sum::<f64>()
                * scale
        })
    };
    let mut out = Vec::with_capacity(n);
    if n >= 5 {
        let s = 1.0 / (12.0 * h);
        let rev = |w: &[f64; 5]| -> [f64; 5] { std::array::from_fn(|k| -w[4 - k]) };
        for i in 0..n {
            out.push(match i {
                0 => combine(0, &EDGE5[0], s),
                1 => combine(0, &EDGE5[1], s),
                i if i == n - 2 => combine(n - 5, &rev(&EDGE5[1]), s),
                i if i == n - 1 => combine(n - 5, &rev(&EDGE5[0]), s),
                i => combine(i - 2, &CENTRAL5, s),
            });
        }
    } else {
        let s = 1.0 / (2.0 * h);
        let back: [f64; 3] = std::array::from_fn(|k| -EDGE3[2 - k]);
        for i in 0..n {
            out.push(match i {
                0 => combine(0, &EDGE3, s),
                i if i == n - 1 => combine(n - 3, &back, s),
                i => combine(i - 1, &CENTRAL3, s),
            });
        }
    }
    Ok(out)
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    let n = times.len();
    if n < 3 {
        return Err(GeometryError::TooFewSamples { needed: 3, got: n });
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    let uniform = h > 0.0
        && times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(f64::MIN_POSITIVE));
    if uniform {
        Ok(h)
    } else {
        Err(GeometryError::NonUniformSpacing)
    }
}

/// Finite-difference diagnostics of a sampled lift. The samples must be
/// uniformly spaced in `t` and lie on `Σ`.
pub fn diagnostics(surface: &FinslerSurface, times: &[f64], states: &[SigmaState]) -> Result<Vec<DiagnosticSample>> {
    if times.len() != states.len() {
        return Err(GeometryError::InvalidParameter(format!(
            "{} times for {} states",
            times.len(),
            states.len()
        )));
    }
    let h = uniform_step(times)?;
    let z: Vec<[f64; 4]> = states.iter().map(|s| [s.x[0], s.x[1], s.n[0], s.n[1]]).collect();
    let zdot = differentiate(&z, h)?;

    struct Partial {
        sigma: f64,
        k: f64,
        k_covariant: f64,
        el_residual: f64,
        el_system_residual: f64,
        orth_drift: f64,
        cartan_term: f64,
    }

    let mut partial = Vec::with_capacity(z.len());
    for (zi, dz) in z.iter().zip(&zdot) {
        let p = BundlePoint::from_coords(*zi)?;
        let frame = FrameJets::new(surface, &p, 4)?;
        let geom = &frame.geometry;
        let omega = |c: usize| -> f64 { (0..4).map(|a| frame.omega[c - 1][a].value() * dz[a]).sum() };
        let sigma = omega(1);
        let w3 = omega(3);
        let k = -sigma * w3;

        let i = frame.cartan_scalar();
        let i1 = frame.derive(1, &i).value();
        let i3 = frame.derive(3, &i).value();
        let di: f64 = (0..4).map(|a| i.partial(a).value() * dz[a]).sum();

        let xdot = [dz[0], dz[1]];
        let n = [zi[2], zi[3]];
        let metric = geom.metric();
        let gamma = geom.connection().chern;
        let dn: [f64; 2] = std::array::from_fn(|a| {
            let mut s = dz[2 + a];
            for j in 0..2 {
                for k in 0..2 {
                    s += xdot[j] * n[k] * gamma[a][j][k];
                }
            }
            s
        });

        let fy = fiber_gradient(surface, p.x, n)?;
        let speed = surface.f(p.x, xdot);
        partial.push(Partial {
            sigma,
            k,
            k_covariant: -metric.inner(dn, xdot),
            el_residual: (i3 + 1.0) * k - i1 * sigma * sigma,
            el_system_residual: di + w3,
            orth_drift: (fy[0] * xdot[0] + fy[1] * xdot[1]).abs() / speed,
            cartan_term: metric.cartan_form(xdot, xdot, dn),
        });
    }

    let sigmas: Vec<[f64; 1]> = partial.iter().map(|d| [d.sigma]).collect();
    let sigma_dot = differentiate(&sigmas, h)?;
    Ok(partial
        .iter()
        .zip(sigma_dot)
        .map(|(d, [sd])| DiagnosticSample {
            sigma: d.sigma,
            k: d.k,
            k_covariant: d.k_covariant,
            b: sd / d.sigma - d.cartan_term / (d.sigma * d.sigma),
            el_residual: d.el_residual,
            el_system_residual: d.el_system_residual,
            orth_drift: d.orth_drift,
        })
        .collect())
}
