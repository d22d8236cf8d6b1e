//! Curve flows on the indicatrix bundle: geodesics, N-parallels and
//! N-extremals, integrated with fixed-step RK4 and projected back onto
//! `F = 1` after every step.

mod diagnostics;
mod normal;

pub use diagnostics::{diagnostics, differentiate, DiagnosticSample};
pub use normal::{first_frame_vector, normal_vector, tangent_from_normal, INDICATRIX_TOL};

use std::fmt;

use serde::Serialize;

use crate::engine::BundlePoint;
use crate::error::{GeometryError, Result};
use crate::frame::FrameJets;
use crate::geometry::{spray_at, LocalGeometry};
use crate::surface::FinslerSurface;

/// A point `(x, N)` of the indicatrix bundle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SigmaState {
    pub x: [f64; 2],
    pub n: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Geodesic,
    NParallel,
    NExtremal,
    /// The second-order downstairs form of the N-parallel equation.
    NParallelDownstairs,
}

impl FlowKind {
    pub fn name(self) -> &'static str {
        match self {
            FlowKind::Geodesic => "geodesic",
            FlowKind::NParallel => "n_parallel",
            FlowKind::NExtremal => "n_extremal",
            FlowKind::NParallelDownstairs => "n_parallel_downstairs",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowOptions {
    /// Rescale onto `F = 1` after every step.
    pub renormalize: bool,
    /// N-extremals halt once `|1 + I₃|` drops to this value.
    pub degenerate_tol: f64,
    /// `d/dt log σ` in the downstairs equation.
    pub log_sigma_rate: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            renormalize: true,
            degenerate_tol: 1e-6,
            log_sigma_rate: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowParams {
    pub kind: FlowKind,
    pub method: &'static str,
    pub length: f64,
    pub step: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FlowStatus {
    Completed,
    LeftChart { t: f64, x: [f64; 2] },
    Degenerate { t: f64, one_plus_i3: f64 },
    Aborted { t: f64, message: String },
}

impl FlowStatus {
    pub fn is_complete(&self) -> bool {
        matches!(self, FlowStatus::Completed)
    }
}

impl fmt::Display for FlowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowStatus::Completed => write!(f, "completed"),
            FlowStatus::LeftChart { t, x } => write!(f, "left chart domain at t = {t:e} near x = {x:?}"),
            FlowStatus::Degenerate { t, one_plus_i3 } => {
                write!(f, "EL degenerate: I3 ≈ -1 at t = {t:e} (1 + I3 = {one_plus_i3:e})")
            }
            FlowStatus::Aborted { t, message } => write!(f, "aborted at t = {t:e}: {message}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: [f64; 2],
    /// The normal `N` for flows on `Σ`, the velocity for geodesics.
    pub fiber: [f64; 2],
    /// Unit tangent `T` with `F(x, T) = 1`.
    pub tangent: [f64; 2],
    pub sigma: Option<f64>,
    pub k: Option<f64>,
    pub k_covariant: Option<f64>,
    pub b: Option<f64>,
    pub el_residual: Option<f64>,
    pub el_system_residual: Option<f64>,
    pub orth_drift: Option<f64>,
    pub indicatrix_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub params: FlowParams,
    pub samples: Vec<Sample>,
    pub status: FlowStatus,
}

impl Trajectory {
    pub fn positions(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|s| s.x).collect()
    }

    pub fn max_abs(&self, field: impl Fn(&Sample) -> Option<f64>) -> f64 {
        self.samples
            .iter()
            .filter_map(field)
            .map(|v| if v.is_nan() { f64::INFINITY } else { v.abs() })
            .fold(0.0, f64::max)
    }
}

/// `max_t |x_a(t) − x_b(t)|` over the common samples.
pub fn max_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(p, q)| (p.x[0] - q.x[0]).hypot(p.x[1] - q.x[1]))
        .fold(0.0, f64::max)
}

type State = [f64; 4];

fn axpy(a: f64, x: &State, y: &State) -> State {
    std::array::from_fn(|i| y[i] + a * x[i])
}

fn step_count(length: f64, step: f64) -> Result<usize> {
    if !(length > 0.0 && length.is_finite() && step > 0.0 && step.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!(
            "length and step must be positive and finite (got {length}, {step})"
        )));
    }
    let n = (length / step).round().max(1.0);
    if n > 1e8 {
        return Err(GeometryError::InvalidParameter(format!("{n} steps requested")));
    }
    Ok(n as usize)
}

fn stop_status(err: GeometryError, t: f64, z: &State) -> FlowStatus {
    match err {
        GeometryError::OutsideChart { .. } => FlowStatus::LeftChart { t, x: [z[0], z[1]] },
        GeometryError::ElDegenerate { one_plus_i3 } => FlowStatus::Degenerate { t, one_plus_i3 },
        e => FlowStatus::Aborted {
            t,
            message: e.to_string(),
        },
    }
}

/// Classical RK4 with a projection after every step.
fn rk4<R, P>(z0: State, steps: usize, dt: f64, rhs: R, project: P) -> (Vec<(f64, State)>, FlowStatus)
where
    R: Fn(&State) -> Result<State>,
    P: Fn(State) -> Result<State>,
{
    let mut out = vec![(0.0, z0)];
    let mut z = z0;
    for n in 0..steps {
        let t = n as f64 * dt;
        let next = (|| {
            let k1 = rhs(&z)?;
            let k2 = rhs(&axpy(0.5 * dt, &k1, &z))?;
            let k3 = rhs(&axpy(0.5 * dt, &k2, &z))?;
            let k4 = rhs(&axpy(dt, &k3, &z))?;
            let raw: State = std::array::from_fn(|i| z[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
            project(raw)
        })();
        match next {
            Ok(z1) if z1.iter().all(|v| v.is_finite()) => {
                z = z1;
                out.push(((n + 1) as f64 * dt, z));
            }
            Ok(_) => {
                return (
                    out,
                    FlowStatus::Aborted {
                        t,
                        message: "non-finite state".into(),
                    },
                )
            }
            Err(e) => return (out, stop_status(e, t, &z)),
        }
    }
    (out, FlowStatus::Completed)
}

fn require_unit(surface: &FinslerSurface, x: [f64; 2], v: [f64; 2]) -> Result<()> {
    BundlePoint::new(x, v)?;
    if !surface.chart.contains(x) {
        return Err(GeometryError::OutsideChart { x });
    }
    let residual = (surface.f(x, v) - 1.0).abs();
    if residual <= INDICATRIX_TOL {
        Ok(())
    } else {
        Err(GeometryError::OffIndicatrix { residual })
    }
}

fn project_fiber(surface: &FinslerSurface, renormalize: bool) -> impl Fn(State) -> Result<State> + '_ {
    move |z| {
        let x = [z[0], z[1]];
        if !surface.chart.contains(x) {
            return Err(GeometryError::OutsideChart { x });
        }
        if !renormalize {
            return Ok(z);
        }
        let n = surface.to_indicatrix(x, [z[2], z[3]])?;
        Ok([z[0], z[1], n[0], n[1]])
    }
}

/// `ż = ê₁ − c ê₃` on `Σ`; `c = 0` for N-parallels, `c = I₁/(1 + I₃)` for N-extremals.
fn sigma_rhs<'a>(surface: &'a FinslerSurface, kind: FlowKind, tol: f64) -> impl Fn(&State) -> Result<State> + 'a {
    move |z| {
        let p = BundlePoint::from_coords(*z)?;
        match kind {
            FlowKind::NParallel => {
                let frame = FrameJets::new(surface, &p, 3)?;
                Ok(std::array::from_fn(|a| frame.e(1)[a].value()))
            }
            _ => {
                let frame = FrameJets::new(surface, &p, 4)?;
                let i = frame.cartan_scalar();
                let i1 = frame.derive(1, &i).value();
                let one_plus_i3 = 1.0 + frame.derive(3, &i).value();
                if !(one_plus_i3.abs() > tol) {
                    return Err(GeometryError::ElDegenerate { one_plus_i3 });
                }
                let c = i1 / one_plus_i3;
                Ok(std::array::from_fn(|a| {
                    frame.e(1)[a].value() - c * frame.e(3)[a].value()
                }))
            }
        }
    }
}

fn finish(surface: &FinslerSurface, params: FlowParams, path: Vec<(f64, State)>, mut status: FlowStatus) -> Trajectory {
    let on_sigma = matches!(params.kind, FlowKind::NParallel | FlowKind::NExtremal);
    let mut samples: Vec<Sample> = Vec::with_capacity(path.len());
    for (t, z) in &path {
        let x = [z[0], z[1]];
        let v = [z[2], z[3]];
        let tangent = if on_sigma {
            tangent_from_normal(surface, x, v)
        } else {
            surface.to_indicatrix(x, v)
        };
        let tangent = match tangent {
            Ok(t) => t,
            Err(e) => {
                status = FlowStatus::Aborted {
                    t: *t,
                    message: e.to_string(),
                };
                break;
            }
        };
        samples.push(Sample {
            t: *t,
            x,
            fiber: v,
            tangent,
            sigma: None,
            k: None,
            k_covariant: None,
            b: None,
            el_residual: None,
            el_system_residual: None,
            orth_drift: None,
            indicatrix_drift: (surface.f(x, v) - 1.0).abs(),
        });
    }
    if on_sigma && samples.len() >= 3 {
        let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
        let states: Vec<SigmaState> = samples.iter().map(|s| SigmaState { x: s.x, n: s.fiber }).collect();
        match diagnostics(surface, &times, &states) {
            Ok(diag) => {
                for (s, d) in samples.iter_mut().zip(diag) {
                    s.sigma = Some(d.sigma);
                    s.k = Some(d.k);
                    s.k_covariant = Some(d.k_covariant);
                    s.b = Some(d.b);
                    s.el_residual = Some(d.el_residual);
                    s.el_system_residual = Some(d.el_system_residual);
                    s.orth_drift = Some(d.orth_drift);
                }
            }
            Err(e) if status.is_complete() => {
                status = FlowStatus::Aborted {
                    t: samples.last().map_or(0.0, |s| s.t),
                    message: format!("diagnostics: {e}"),
                }
            }
            Err(_) => {}
        }
    }
    Trajectory {
        params,
        samples,
        status,
    }
}

/// Integrates one flow from `(x₀, v₀)`: `v₀` is the unit tangent for the
/// geodesic flow and the unit normal for the others.
pub fn integrate_flow(
    surface: &FinslerSurface,
    kind: FlowKind,
    x0: [f64; 2],
    v0: [f64; 2],
    length: f64,
    step: f64,
    options: &FlowOptions,
) -> Result<Trajectory> {
    let steps = step_count(length, step)?;
    let dt = length / steps as f64;
    require_unit(surface, x0, v0)?;
    let v0 = surface.to_indicatrix(x0, v0)?;
    let params = FlowParams {
        kind,
        method: "rk4",
        length,
        step: dt,
        steps,
    };
    let z0 = [x0[0], x0[1], v0[0], v0[1]];
    let (path, status) = match kind {
        FlowKind::Geodesic => {
            let rhs = |z: &State| -> Result<State> {
                let g = spray_at(surface, [z[0], z[1]], [z[2], z[3]])?;
                Ok([z[2], z[3], -2.0 * g[0], -2.0 * g[1]])
            };
            rk4(z0, steps, dt, rhs, project_fiber(surface, options.renormalize))
        }
        FlowKind::NParallel | FlowKind::NExtremal => rk4(
            z0,
            steps,
            dt,
            sigma_rhs(surface, kind, options.degenerate_tol),
            project_fiber(surface, options.renormalize),
        ),
        FlowKind::NParallelDownstairs => return downstairs_n_parallel(surface, x0, v0, length, step, options),
    };
    Ok(finish(surface, params, path, status))
}

pub fn geodesic_flow(
    surface: &FinslerSurface,
    x0: [f64; 2],
    t0: [f64; 2],
    length: f64,
    step: f64,
) -> Result<Trajectory> {
    integrate_flow(
        surface,
        FlowKind::Geodesic,
        x0,
        t0,
        length,
        step,
        &FlowOptions::default(),
    )
}

pub fn n_parallel_flow(
    surface: &FinslerSurface,
    x0: [f64; 2],
    n0: [f64; 2],
    length: f64,
    step: f64,
) -> Result<Trajectory> {
    integrate_flow(
        surface,
        FlowKind::NParallel,
        x0,
        n0,
        length,
        step,
        &FlowOptions::default(),
    )
}

pub fn n_extremal_flow(
    surface: &FinslerSurface,
    x0: [f64; 2],
    n0: [f64; 2],
    length: f64,
    step: f64,
) -> Result<Trajectory> {
    integrate_flow(
        surface,
        FlowKind::NExtremal,
        x0,
        n0,
        length,
        step,
        &FlowOptions::default(),
    )
}

/// The N-parallel equation on `M`:
/// `ẍ^i + Γ^i_jk(x, N(x, ẋ)) ẋ^j ẋ^k = ρ ẋ^i` with `ρ = d/dt log σ`,
/// started from `ẋ(0) = e₁(x₀, N₀)` so that it shares the `σ ≡ 1` clock of
/// [`n_parallel_flow`] when `ρ = 0`. The fiber slot of each sample holds `ẋ`.
pub fn downstairs_n_parallel(
    surface: &FinslerSurface,
    x0: [f64; 2],
    n0: [f64; 2],
    length: f64,
    step: f64,
    options: &FlowOptions,
) -> Result<Trajectory> {
    let steps = step_count(length, step)?;
    let dt = length / steps as f64;
    require_unit(surface, x0, n0)?;
    let n0 = surface.to_indicatrix(x0, n0)?;
    let (v0, _) = first_frame_vector(surface, x0, n0)?;
    let rho = options.log_sigma_rate;
    let rhs = |z: &State| -> Result<State> {
        let x = [z[0], z[1]];
        let v = [z[2], z[3]];
        let n = normal_vector(surface, x, v)?;
        let geom = LocalGeometry::new(surface, &BundlePoint::new(x, n)?, LocalGeometry::MIN_DEGREE)?;
        let gamma = geom.connection().chern;
        let acc: [f64; 2] = std::array::from_fn(|i| {
            let mut s = rho * v[i];
            for j in 0..2 {
                for k in 0..2 {
                    s -= gamma[i][j][k] * v[j] * v[k];
                }
            }
            s
        });
        Ok([v[0], v[1], acc[0], acc[1]])
    };
    let (path, status) = rk4(
        [x0[0], x0[1], v0[0], v0[1]],
        steps,
        dt,
        rhs,
        project_fiber(surface, false),
    );
    let params = FlowParams {
        kind: FlowKind::NParallelDownstairs,
        method: "rk4",
        length,
        step: dt,
        steps,
    };
    Ok(finish(surface, params, path, status))
}
