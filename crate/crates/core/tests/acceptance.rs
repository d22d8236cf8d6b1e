//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use finsler::engine::BundlePoint;
use finsler::flows::{
    downstairs_n_parallel, geodesic_flow, max_distance, n_extremal_flow, n_parallel_flow, tangent_from_normal,
    FlowOptions, Trajectory,
};
use finsler::frame::{invariants, FrameJets, FrameScalar};
use finsler::surface::{fixture, is_riemannian, FinslerSurface, FIXTURE_NAMES};
use finsler::verify::{
    bianchi_residuals, bracket_residuals, indicatrix_mean_i, ricci_residuals, sample_points, structure_residuals,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::initial_conditions;

const SEED: u64 = 20;
const POINTS: usize = 100;
const STEP: f64 = 1e-3;

type Outcome = Result<String, String>;
type Flow = fn(&FinslerSurface, [f64; 2], [f64; 2], f64, f64) -> finsler::Result<Trajectory>;

fn all_fixtures() -> Vec<FinslerSurface> {
    FIXTURE_NAMES.iter().map(|n| fixture(n).unwrap()).collect()
}

fn points(s: &FinslerSurface) -> Vec<BundlePoint> {
    sample_points(s, POINTS, SEED).unwrap()
}

/// Collects "name=value" details and the first violation.
#[derive(Default)]
struct Check {
    details: Vec<String>,
    failures: Vec<String>,
}

impl Check {
    fn below(&mut self, label: &str, value: f64, bound: f64) {
        let line = format!("{label}={value:.2e}<{bound:.0e}");
        if value < bound {
            self.details.push(line);
        } else {
            self.failures.push(line);
        }
    }

    fn above(&mut self, label: &str, value: f64, bound: f64) {
        let line = format!("{label}={value:.2e}>{bound:.1e}");
        if value > bound {
            self.details.push(line);
        } else {
            self.failures.push(line);
        }
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    fn finish(self) -> Outcome {
        if self.failures.is_empty() {
            Ok(self.details.join(" "))
        } else {
            Err(self.failures.join(" "))
        }
    }
}

fn structure_equations() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures() {
        let tol = if s.name == "randers_nonberwald" { 1e-6 } else { 1e-7 };
        let worst = structure_residuals(&s, &points(&s), tol)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|r| r.max_residual)
            .fold(0.0, f64::max);
        c.below(&s.name, worst, tol);
    }
    c.finish()
}

fn riemannian_recovery() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures().into_iter().filter(is_riemannian) {
        let gauss = s.closed_form.unwrap().gauss_curvature;
        let (mut ij, mut dk) = (0.0f64, 0.0f64);
        for p in points(&s) {
            let inv = invariants(&s, &p).map_err(|e| e.to_string())?;
            ij = ij.max(inv.i.abs()).max(inv.j.abs());
            dk = dk.max((inv.k - gauss(p.x)).abs());
        }
        c.below(&format!("{}:|I|,|J|", s.name), ij, 1e-8);
        c.below(&format!("{}:|K-K_gauss|", s.name), dk, 1e-6);
    }
    c.finish()
}

fn locally_minkowski() -> Outcome {
    let s = fixture("randers_minkowski").unwrap();
    let mut worst = [0.0f64; 4];
    for p in points(&s) {
        let inv = invariants(&s, &p).map_err(|e| e.to_string())?;
        for (w, v) in worst.iter_mut().zip([inv.k, inv.j, inv.i1, inv.i2]) {
            *w = w.max(v.abs());
        }
    }
    let mut c = Check::default();
    for (label, w) in ["K", "J", "I1", "I2"].iter().zip(worst) {
        c.below(label, w, 1e-7);
    }
    c.finish()
}

fn bianchi() -> Outcome {
    let s = fixture("randers_nonberwald").unwrap();
    let [a, b] = bianchi_residuals(&s, &points(&s), 1e-6, 1e-5).map_err(|e| e.to_string())?;
    let mut c = Check::default();
    c.below("|J-I2|", a.max_residual, 1e-6);
    c.below("|K3+KI+J2|", b.max_residual, 1e-5);
    c.finish()
}

fn ricci() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures() {
        for f in [FrameScalar::CartanScalar, FrameScalar::Curvature] {
            let worst = ricci_residuals(&s, &f, &points(&s), 1e-5)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|r| r.max_residual)
                .fold(0.0, f64::max);
            c.below(&format!("{}:{}", s.name, f.name()), worst, 1e-5);
        }
    }
    c.finish()
}

fn brackets() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures() {
        let worst = bracket_residuals(&s, &points(&s), 1e-5)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|r| r.max_residual)
            .fold(0.0, f64::max);
        c.below(&s.name, worst, 1e-5);
    }
    c.finish()
}

fn indicatrix_mean() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x = s.chart.sample(&mut rng, 0.05);
            let m = indicatrix_mean_i(&s, x, 512).map_err(|e| e.to_string())?;
            worst = worst.max(m.relative());
        }
        c.below(&s.name, worst, 1e-6);
    }
    c.finish()
}

fn flows_for(s: &FinslerSurface, f: Flow) -> Result<Vec<Trajectory>, String> {
    initial_conditions(s, 3, SEED)
        .into_iter()
        .map(|(x0, n0)| {
            let tr = f(s, x0, n0, 1.0, STEP).map_err(|e| e.to_string())?;
            if tr.status.is_complete() {
                Ok(tr)
            } else {
                Err(format!("{}: {}", s.name, tr.status))
            }
        })
        .collect()
}

fn n_parallel_curvature() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures() {
        let trs = match flows_for(&s, n_parallel_flow) {
            Ok(t) => t,
            Err(e) => {
                c.fail(e);
                continue;
            }
        };
        let worst =
            |f: fn(&finsler::flows::Sample) -> Option<f64>| trs.iter().map(|t| t.max_abs(f)).fold(0.0, f64::max);
        c.below(&format!("{}:|k|", s.name), worst(|x| x.k), 1e-7);
        c.below(&format!("{}:|F-1|", s.name), worst(|x| Some(x.indicatrix_drift)), 1e-7);
        c.below(&format!("{}:|gN(N,T)|", s.name), worst(|x| x.orth_drift), 1e-7);
    }
    c.finish()
}

fn euler_lagrange() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures() {
        let trs = match flows_for(&s, n_extremal_flow) {
            Ok(t) => t,
            Err(e) => {
                c.fail(e);
                continue;
            }
        };
        let el = trs.iter().map(|t| t.max_abs(|x| x.el_residual)).fold(0.0, f64::max);
        let sys = trs
            .iter()
            .map(|t| t.max_abs(|x| x.el_system_residual))
            .fold(0.0, f64::max);
        c.below(&format!("{}:EL", s.name), el, 1e-6);
        c.below(&format!("{}:EL-system", s.name), sys, 1e-6);
    }
    c.finish()
}

fn coincidences() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures() {
        let (x0, n0) = initial_conditions(&s, 1, SEED + 1)[0];
        let run = || -> Result<(Trajectory, Trajectory, Trajectory), String> {
            let np = n_parallel_flow(&s, x0, n0, 1.0, STEP).map_err(|e| e.to_string())?;
            let ne = n_extremal_flow(&s, x0, n0, 1.0, STEP).map_err(|e| e.to_string())?;
            let t0 = tangent_from_normal(&s, x0, n0).map_err(|e| e.to_string())?;
            let g = geodesic_flow(&s, x0, t0, 1.0, STEP).map_err(|e| e.to_string())?;
            Ok((np, ne, g))
        };
        let (np, ne, g) = match run() {
            Ok(r) => r,
            Err(e) => {
                c.fail(format!("{}: {e}", s.name));
                continue;
            }
        };
        let d_ext = max_distance(&np, &ne);
        match s.name.as_str() {
            "randers_nonberwald" => {
                let frame = FrameJets::new(&s, &BundlePoint::new(x0, n0).unwrap(), 4).map_err(|e| e.to_string())?;
                let i1 = frame.derive(1, &frame.cartan_scalar()).value();
                c.above("randers_nonberwald:|I1(start)|", i1.abs(), 1e-3);
                c.above("randers_nonberwald:d(par,ext)", d_ext, 10.0 * STEP);
            }
            name => {
                c.below(&format!("{name}:d(par,ext)"), d_ext, 1e-7);
                if is_riemannian(&s) {
                    c.below(&format!("{name}:d(par,geo)"), max_distance(&np, &g), 1e-6);
                }
            }
        }
    }
    c.finish()
}

fn integrator_order() -> Outcome {
    let s = fixture("sphere").unwrap();
    let x0 = [1.0, 0.0];
    let t0 = s.to_indicatrix(x0, [0.6, 1.2]).unwrap();
    let (h, length) = (0.1, 2.0);
    let run = |step: f64| geodesic_flow(&s, x0, t0, length, step).map_err(|e| e.to_string());
    let (coarse, half, reference) = (run(h)?, run(h / 2.0)?, run(h / 8.0)?);
    let error = |tr: &Trajectory, stride: usize| {
        tr.samples
            .iter()
            .enumerate()
            .filter(|(i, _)| i % stride == 0)
            .map(|(i, smp)| {
                let r = &reference.samples[i * (8 / stride)].x;
                (smp.x[0] - r[0]).hypot(smp.x[1] - r[1])
            })
            .fold(0.0, f64::max)
    };
    let e1 = error(&coarse, 1);
    let e2 = error(&half, 2);
    let mut c = Check::default();
    c.details.push(format!("e(h)={e1:.2e} e(h/2)={e2:.2e}"));
    c.above("ratio", e1 / e2, 12.0);
    c.finish()
}

fn downstairs_cross_validation() -> Outcome {
    let mut c = Check::default();
    for s in all_fixtures() {
        for (x0, n0) in initial_conditions(&s, 2, SEED + 2) {
            let up = n_parallel_flow(&s, x0, n0, 1.0, STEP).map_err(|e| e.to_string())?;
            let down =
                downstairs_n_parallel(&s, x0, n0, 1.0, STEP, &FlowOptions::default()).map_err(|e| e.to_string())?;
            if !(up.status.is_complete() && down.status.is_complete()) {
                c.fail(format!("{}: {} / {}", s.name, up.status, down.status));
                continue;
            }
            c.below(&s.name, max_distance(&up, &down), 1e-6);
        }
    }
    c.finish()
}

fn cli_run(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_golden() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |name: &str, body: &str| std::fs::write(dir.path().join(name), body).unwrap();
    write(
        "run.json",
        r#"{"surface": "randers_nonberwald", "seed": 9,
            "invariants": {"grid": [4, 4], "directions": 6},
            "verify": {"points": 30, "mean_points": 3},
            "integrate": {"flow": "n_extremal", "x0": [-0.3, 0.2], "n0": [0.1, 1.0], "length": 0.5, "step": 0.002},
            "compare": {"x0": [-0.3, 0.2], "n0": [0.1, 1.0], "length": 0.5, "step": 0.002}}"#,
    );
    write(
        "broken.json",
        r#"{"surface": {"family": "randers", "chart": {"rect": {"x1": [-1, 1], "x2": [-1, 1]}}, "b": [1.1, 0]}}"#,
    );
    write("malformed.json", r#"{"surface": "sphere", "verify": {"points": }"#);
    write(
        "strict.json",
        r#"{"surface": "randers_nonberwald", "verify": {"points": 5, "mean_points": 1,
            "tolerances": {"first_order": 1e-30, "higher_order": 1e-30, "mean_i": 1e-30}}}"#,
    );
    write(
        "euclid.json",
        r#"{"surface": "euclidean", "verify": {"points": 10, "mean_points": 2}}"#,
    );

    let mut c = Check::default();
    for cmd in ["invariants", "verify", "integrate", "compare"] {
        let a = cli_run(&[cmd, "--config", "run.json", "--out", "a.out"], dir.path());
        let b = cli_run(
            &[cmd, "--config", "run.json", "--out", "b.out", "--jobs", "4"],
            dir.path(),
        );
        let (fa, fb) = (
            std::fs::read(dir.path().join("a.out")).unwrap_or_default(),
            std::fs::read(dir.path().join("b.out")).unwrap_or_default(),
        );
        if a.0 != 0 || b.0 != 0 || fa.is_empty() || fa != fb {
            c.fail(format!("{cmd}: exit {}/{} identical={}", a.0, b.0, fa == fb));
        } else {
            c.details.push(format!("{cmd}:identical"));
        }
    }
    for (cfg, want) in [
        ("euclid.json", 0),
        ("strict.json", 1),
        ("broken.json", 2),
        ("malformed.json", 2),
    ] {
        let (code, _) = cli_run(&["verify", "--config", cfg], dir.path());
        if code == want {
            c.details.push(format!("{cfg}->{code}"));
        } else {
            c.fail(format!("{cfg}: exit {code}, expected {want}"));
        }
    }
    c.finish()
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 13] = [
        ("structure equations", structure_equations),
        ("Riemannian recovery", riemannian_recovery),
        ("locally Minkowski", locally_minkowski),
        ("Bianchi identities", bianchi),
        ("Ricci identities", ricci),
        ("frame brackets", brackets),
        ("indicatrix mean of I", indicatrix_mean),
        ("N-parallel curvature and drifts", n_parallel_curvature),
        ("Euler-Lagrange residuals", euler_lagrange),
        ("special-case coincidences", coincidences),
        ("integrator order", integrator_order),
        ("downstairs cross-validation", downstairs_cross_validation),
        ("CLI determinism and exit codes", cli_golden),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
