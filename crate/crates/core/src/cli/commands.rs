use rayon::prelude::*;
use serde::Serialize;

use crate::engine::BundlePoint;
use crate::flows::{
    first_frame_vector, integrate_flow, max_distance, normal_vector, tangent_from_normal, FlowKind, FlowOptions,
    FlowStatus, Trajectory,
};
use crate::frame::{invariants, FrameJets};
use crate::geometry::validate_surface;
use crate::surface::FinslerSurface;
use crate::verify::{verify_surface, VerifySettings};

use super::config::{InitialCondition, RunConfig};
use super::output::{fmt_f64, fmt_opt, json};
use super::CliError;

/// A rendered output document and whether the run passed.
#[derive(Debug)]
pub struct Outcome {
    pub document: String,
    pub failure: Option<String>,
}

impl Outcome {
    fn pass(document: String) -> Self {
        Outcome {
            document,
            failure: None,
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Builds the surface and rejects it unless every sampled check passes.
pub fn load_surface(cfg: &RunConfig) -> Result<FinslerSurface, CliError> {
    let surface = cfg.surface.build()?;
    let report = validate_surface(&surface, cfg.validation_samples, cfg.seed);
    if !report.pass() {
        return Err(CliError::Config(format!(
            "surface {} failed validation: {}",
            surface.name,
            report.failures().join("; ")
        )));
    }
    Ok(surface)
}

pub const INVARIANT_COLUMNS: &str = "x1,x2,y1,y2,I,J,K,I1,I2,I3,K1,K2,K3,one_plus_I3";

pub fn cmd_invariants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let surface = load_surface(cfg)?;
    let [n1, n2] = cfg.invariants.grid;
    let nd = cfg.invariants.directions;
    let nodes = surface.chart.grid(n1, n2);
    let points: Vec<([f64; 2], [f64; 2])> = nodes
        .iter()
        .flat_map(|&x| {
            (0..nd).map(move |k| {
                let th = std::f64::consts::TAU * k as f64 / nd as f64;
                (x, [th.cos(), th.sin()])
            })
        })
        .collect();
    let rows = points
        .par_iter()
        .map(|&(x, u)| -> Result<String, CliError> {
            let y = surface.to_indicatrix(x, u).map_err(runtime)?;
            let p = BundlePoint::new(x, y).map_err(runtime)?;
            let s = invariants(&surface, &p).map_err(runtime)?;
            let cols = [
                x[0],
                x[1],
                y[0],
                y[1],
                s.i,
                s.j,
                s.k,
                s.i1,
                s.i2,
                s.i3,
                s.k1,
                s.k2,
                s.k3,
                1.0 + s.i3,
            ];
            Ok(cols.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut doc = String::from(INVARIANT_COLUMNS);
    doc.push('\n');
    for r in rows {
        doc.push_str(&r);
        doc.push('\n');
    }
    Ok(Outcome::pass(doc))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let surface = load_surface(cfg)?;
    let settings = VerifySettings {
        points: cfg.verify.points,
        mean_points: cfg.verify.mean_points,
        quadrature: cfg.verify.quadrature,
        tolerances: cfg.verify.tolerances,
        seed: cfg.seed,
    };
    let report = verify_surface(&surface, &settings).map_err(runtime)?;
    let failed: Vec<&str> = report
        .identities
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    let failure = (!failed.is_empty()).then(|| format!("identities failed: {}", failed.join(", ")));
    Ok(Outcome {
        document: json(&report)?,
        failure,
    })
}

type InitialData = ([f64; 2], [f64; 2], [f64; 2]);

/// Resolves `(x₀, N₀, T₀)` on the indicatrix from whichever direction was given.
fn resolve_initial(surface: &FinslerSurface, ic: &InitialCondition) -> Result<InitialData, CliError> {
    let x0 = ic.x0;
    if !surface.chart.contains(x0) {
        return Err(CliError::Config(format!("x0 = {x0:?} lies outside the chart domain")));
    }
    let unit = |v: [f64; 2]| surface.to_indicatrix(x0, v).map_err(runtime);
    match (ic.n0, ic.t0) {
        (Some(n), _) => {
            let n0 = unit(n)?;
            Ok((x0, n0, tangent_from_normal(surface, x0, n0).map_err(runtime)?))
        }
        (None, Some(t)) => {
            let t0 = unit(t)?;
            Ok((x0, normal_vector(surface, x0, t0).map_err(runtime)?, t0))
        }
        (None, None) => Err(CliError::Config("give exactly one of n0 and t0".into())),
    }
}

pub const TRAJECTORY_COLUMNS: &str = "t,x1,x2,N1,N2,T1,T2,sigma,k,el_residual,orth_drift,indicatrix_drift";

fn trajectory_csv(config_echo: &str, tr: &Trajectory) -> String {
    let mut doc = format!("# config: {config_echo}\n{TRAJECTORY_COLUMNS}\n");
    for s in &tr.samples {
        let cols = [
            fmt_f64(s.t),
            fmt_f64(s.x[0]),
            fmt_f64(s.x[1]),
            fmt_f64(s.fiber[0]),
            fmt_f64(s.fiber[1]),
            fmt_f64(s.tangent[0]),
            fmt_f64(s.tangent[1]),
            fmt_opt(s.sigma),
            fmt_opt(s.k),
            fmt_opt(s.el_residual),
            fmt_opt(s.orth_drift),
            fmt_f64(s.indicatrix_drift),
        ];
        doc.push_str(&cols.join(","));
        doc.push('\n');
    }
    doc.push_str(&format!("# status: {}\n", tr.status));
    doc
}

fn status_failure(kind: FlowKind, status: &FlowStatus) -> Option<String> {
    (!status.is_complete()).then(|| format!("{} flow stopped: {status}", kind.name()))
}

pub fn cmd_integrate(cfg: &RunConfig, config_echo: &str) -> Result<Outcome, CliError> {
    let ic = cfg
        .integrate
        .as_ref()
        .ok_or_else(|| CliError::Config("missing \"integrate\" section".into()))?;
    let surface = load_surface(cfg)?;
    let (x0, n0, t0) = resolve_initial(&surface, &ic.initial)?;
    let options = FlowOptions {
        renormalize: ic.renormalize,
        degenerate_tol: ic.degenerate_tol,
        ..FlowOptions::default()
    };
    let v0 = if ic.flow == FlowKind::Geodesic { t0 } else { n0 };
    let tr = integrate_flow(&surface, ic.flow, x0, v0, ic.length, ic.step, &options).map_err(runtime)?;
    Ok(Outcome {
        document: trajectory_csv(config_echo, &tr),
        failure: status_failure(ic.flow, &tr.status),
    })
}

#[derive(Serialize)]
struct FlowSummary {
    flow: &'static str,
    samples: usize,
    status: String,
    end: [f64; 2],
}

#[derive(Serialize)]
struct Distances {
    n_parallel_vs_n_extremal: f64,
    n_parallel_vs_geodesic: f64,
    n_extremal_vs_geodesic: f64,
}

#[derive(Serialize)]
struct CompareReport {
    fixture: String,
    x0: [f64; 2],
    n0: [f64; 2],
    t0: [f64; 2],
    length: f64,
    step: f64,
    /// `I₁` at the start point; N-parallels and N-extremals separate when it is non-zero.
    i1_at_start: f64,
    distances: Distances,
    /// Angle in radians between the lifts `ê₁` and `ê₂` at `(x₀, N₀)`.
    lift_angle_e1_e2: f64,
    /// `F(x₀, e₁(x₀, N₀))`, the speed of the N-flows in units of the geodesic's.
    n_flow_speed: f64,
    flows: Vec<FlowSummary>,
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cc = cfg
        .compare
        .as_ref()
        .ok_or_else(|| CliError::Config("missing \"compare\" section".into()))?;
    let surface = load_surface(cfg)?;
    let (x0, n0, t0) = resolve_initial(&surface, &cc.initial)?;
    let kinds = [FlowKind::NParallel, FlowKind::NExtremal, FlowKind::Geodesic];
    let runs = kinds
        .par_iter()
        .map(|&kind| {
            let v0 = if kind == FlowKind::Geodesic { t0 } else { n0 };
            integrate_flow(&surface, kind, x0, v0, cc.length, cc.step, &FlowOptions::default())
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(runtime)?;
    let (np, ne, geo) = (&runs[0], &runs[1], &runs[2]);

    let frame = FrameJets::new(&surface, &BundlePoint::new(x0, n0).map_err(runtime)?, 4).map_err(runtime)?;
    let i = frame.cartan_scalar();
    let fd = frame.frame_data();
    let (e1, e2) = (&fd.ehat[0], &fd.ehat[1]);
    let dot: f64 = (0..4).map(|a| e1.0[a] * e2.0[a]).sum();
    let cos = (dot.abs() / (e1.norm() * e2.norm())).min(1.0);
    let (e1_down, _) = first_frame_vector(&surface, x0, n0).map_err(runtime)?;

    let report = CompareReport {
        fixture: surface.name.clone(),
        x0,
        n0,
        t0,
        length: cc.length,
        step: np.params.step,
        i1_at_start: frame.derive(1, &i).value(),
        distances: Distances {
            n_parallel_vs_n_extremal: max_distance(np, ne),
            n_parallel_vs_geodesic: max_distance(np, geo),
            n_extremal_vs_geodesic: max_distance(ne, geo),
        },
        lift_angle_e1_e2: cos.acos(),
        n_flow_speed: surface.f(x0, e1_down),
        flows: runs
            .iter()
            .map(|tr| FlowSummary {
                flow: tr.params.kind.name(),
                samples: tr.samples.len(),
                status: tr.status.to_string(),
                end: tr.samples.last().map_or(x0, |s| s.x),
            })
            .collect(),
    };
    let failures: Vec<String> = runs
        .iter()
        .filter_map(|tr| status_failure(tr.params.kind, &tr.status))
        .collect();
    Ok(Outcome {
        document: json(&report)?,
        failure: (!failures.is_empty()).then(|| failures.join("; ")),
    })
}
