//! Residual suites for the structure equations, Bianchi and Ricci
//! identities, frame brackets, the indicatrix mean of `I`, and the
//! non-degeneracy scalar `1 + I₃`.
//!
//! All point evaluations go through rayon; reductions are maxima, so the
//! result does not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{lie_bracket, BundlePoint, Jet};
use crate::error::Result;
use crate::frame::{to_sigma, FrameJets, FrameScalar, InvariantSet, INVARIANT_DEGREE};
use crate::geometry::{fiber_gradient, metric_jet};
use crate::surface::FinslerSurface;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(name: impl Into<String>, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        ResidualReport {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
        }
    }
}

/// Per-run tolerances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Identities involving first derivatives of the frame.
    pub first_order: f64,
    /// Identities involving third or fourth derivatives of `F`.
    pub higher_order: f64,
    /// Relative bound on `|∮ I ds| / L`.
    pub mean_i: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            first_order: 1e-7,
            higher_order: 1e-5,
            mean_i: 1e-6,
        }
    }
}

/// NaN-aware maximum: any NaN makes the result infinite.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .map(|v| if v.is_nan() { f64::INFINITY } else { v.abs() })
        .fold(0.0, f64::max)
}

/// Columnwise worst residual over points.
fn reduce<const N: usize>(rows: Vec<[f64; N]>) -> [f64; N] {
    std::array::from_fn(|c| worst(rows.iter().map(|r| r[c])))
}

fn per_point<const N: usize, F>(surface: &FinslerSurface, points: &[BundlePoint], f: F) -> Result<[f64; N]>
where
    F: Fn(&BundlePoint) -> Result<[f64; N]> + Sync,
{
    let rows = points
        .par_iter()
        .map(|p| to_sigma(surface, p).and_then(|q| f(&q)))
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(rows))
}

/// Random points of `Σ` drawn from the chart.
pub fn sample_points(surface: &FinslerSurface, n: usize, seed: u64) -> Result<Vec<BundlePoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| surface.sample_sigma(&mut rng)).collect()
}

const PAIRS: [(usize, usize); 3] = [(1, 2), (1, 3), (2, 3)];

/// `(α ∧ β)(X, Y)` from the pairings `α(X), β(X), α(Y), β(Y)`.
fn wedge(dual: &[[f64; 3]; 3], a: usize, b: usize, x: usize, y: usize) -> f64 {
    dual[a - 1][x - 1] * dual[b - 1][y - 1] - dual[a - 1][y - 1] * dual[b - 1][x - 1]
}

/// Residuals of
/// `dω¹ = −Iω¹∧ω³ + ω²∧ω³`, `dω² = −ω¹∧ω³`, `dω³ = Kω¹∧ω² − Jω¹∧ω³`
/// on the frame pairs `(ê₁,ê₂)`, `(ê₁,ê₃)`, `(ê₂,ê₃)`.
pub fn structure_residuals(surface: &FinslerSurface, points: &[BundlePoint], tol: f64) -> Result<[ResidualReport; 3]> {
    let worst = per_point(surface, points, |p| {
        let frame = FrameJets::new(surface, p, 4)?;
        let inv = frame.invariant_jets();
        let (i, j, k) = (inv.i.value(), inv.j.value(), inv.k.value());
        let dual = frame.duality();
        let d: [_; 3] = std::array::from_fn(|c| frame.d_omega(c + 1));
        let mut out = [0.0f64; 3];
        for (x, y) in PAIRS {
            let (ex, ey) = (frame.e(x), frame.e(y));
            let w = |a, b| wedge(&dual, a, b, x, y);
            let lhs: [f64; 3] = std::array::from_fn(|c| d[c].apply(ex, ey).value());
            let rhs = [-i * w(1, 3) + w(2, 3), -w(1, 3), k * w(1, 2) - j * w(1, 3)];
            for c in 0..3 {
                out[c] = out[c].max((lhs[c] - rhs[c]).abs());
            }
        }
        Ok(out)
    })?;
    let n = points.len();
    Ok([
        ResidualReport::new("structure_d_omega1", n, worst[0], tol),
        ResidualReport::new("structure_d_omega2", n, worst[1], tol),
        ResidualReport::new("structure_d_omega3", n, worst[2], tol),
    ])
}

/// `|J − I₂|` and `|K₃ + KI + J₂|`.
pub fn bianchi_residuals(
    surface: &FinslerSurface,
    points: &[BundlePoint],
    tol_first: f64,
    tol_higher: f64,
) -> Result<[ResidualReport; 2]> {
    let worst = per_point(surface, points, |p| {
        let s = InvariantSet::from_frame(&FrameJets::new(surface, p, INVARIANT_DEGREE)?);
        Ok([s.j - s.i2, s.k3 + s.k * s.i + s.j2])
    })?;
    let n = points.len();
    Ok([
        ResidualReport::new("bianchi_J_eq_I2", n, worst[0], tol_first),
        ResidualReport::new("bianchi_K3_KI_J2", n, worst[1], tol_higher),
    ])
}

/// `|K₃ + KI + I₂₂|`, the form the `K₃` identity takes when `I₁ = 0`.
/// Reported only.
pub fn s_surface_bianchi_diagnostic(surface: &FinslerSurface, points: &[BundlePoint]) -> Result<f64> {
    let [w] = per_point(surface, points, |p| {
        let s = InvariantSet::from_frame(&FrameJets::new(surface, p, INVARIANT_DEGREE)?);
        Ok([s.k3 + s.k * s.i + s.i22])
    })?;
    Ok(w)
}

/// Ricci identities with `f_ab = ê_b(ê_a f)`:
/// `f₂₁ − f₁₂ = −Kf₃`, `f₃₂ − f₂₃ = −f₁`, `f₃₁ − f₁₃ = If₁ + f₂ + Jf₃`.
pub fn ricci_residuals(
    surface: &FinslerSurface,
    f: &FrameScalar,
    points: &[BundlePoint],
    tol: f64,
) -> Result<[ResidualReport; 3]> {
    let degree = f.degree_for_second_derivatives();
    let worst = per_point(surface, points, |p| {
        let frame = FrameJets::new(surface, p, degree)?;
        let inv = frame.invariant_jets();
        let (i, j, k) = (inv.i.value(), inv.j.value(), inv.k.value());
        let fj = f.jet(&frame);
        let first: [Jet; 3] = std::array::from_fn(|a| frame.derive(a + 1, &fj));
        let second = |a: usize, b: usize| frame.derive(b, &first[a - 1]).value();
        let f1 = first[0].value();
        let f2 = first[1].value();
        let f3 = first[2].value();
        Ok([
            second(2, 1) - second(1, 2) + k * f3,
            second(3, 2) - second(2, 3) + f1,
            second(3, 1) - second(1, 3) - (i * f1 + f2 + j * f3),
        ])
    })?;
    let n = points.len();
    let name = f.name();
    Ok([
        ResidualReport::new(format!("ricci_12_{name}"), n, worst[0], tol),
        ResidualReport::new(format!("ricci_23_{name}"), n, worst[1], tol),
        ResidualReport::new(format!("ricci_13_{name}"), n, worst[2], tol),
    ])
}

/// `[ê₁,ê₂] = −Kê₃`, `[ê₂,ê₃] = −ê₁`, `[ê₃,ê₁] = −Iê₁ − ê₂ − Jê₃`,
/// compared through their coframe components.
pub fn bracket_residuals(surface: &FinslerSurface, points: &[BundlePoint], tol: f64) -> Result<[ResidualReport; 3]> {
    let worst = per_point(surface, points, |p| {
        let frame = FrameJets::new(surface, p, 4)?;
        let inv = frame.invariant_jets();
        let (i, j, k) = (inv.i.value(), inv.j.value(), inv.k.value());
        let cases = [
            ((1, 2), [0.0, 0.0, -k]),
            ((2, 3), [-1.0, 0.0, 0.0]),
            ((3, 1), [-i, -1.0, -j]),
        ];
        let mut out = [0.0f64; 3];
        for (n, ((a, b), want)) in cases.into_iter().enumerate() {
            let br = lie_bracket(frame.e(a), frame.e(b));
            for c in 0..3 {
                out[n] = out[n].max((frame.pair(c + 1, &br).value() - want[c]).abs());
            }
        }
        Ok(out)
    })?;
    let n = points.len();
    Ok([
        ResidualReport::new("bracket_e1_e2", n, worst[0], tol),
        ResidualReport::new("bracket_e2_e3", n, worst[1], tol),
        ResidualReport::new("bracket_e3_e1", n, worst[2], tol),
    ])
}

/// `|I + dω¹(ê₁, ê₃)|`: the Cartan scalar from the Cartan tensor against the
/// one read off the first structure equation.
pub fn cross_path_residual(surface: &FinslerSurface, points: &[BundlePoint], tol: f64) -> Result<ResidualReport> {
    let [w] = per_point(surface, points, |p| {
        let frame = FrameJets::new(surface, p, 4)?;
        let from_structure = -frame.d_omega(1).apply(frame.e(1), frame.e(3)).value();
        Ok([frame.cartan_scalar().value() - from_structure])
    })?;
    Ok(ResidualReport::new("cross_path_I", points.len(), w, tol))
}

/// `∮ I ds` over the indicatrix at `x` and its length, both in the metric
/// `ĝ = g_ij dy^i dy^j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IndicatrixMean {
    pub value: f64,
    #[serde(rename = "L")]
    pub length: f64,
}

impl IndicatrixMean {
    pub fn relative(&self) -> f64 {
        self.value.abs() / self.length
    }
}

pub const DEFAULT_QUADRATURE: usize = 512;

pub fn indicatrix_mean_i(surface: &FinslerSurface, x: [f64; 2], n_quad: usize) -> Result<IndicatrixMean> {
    if n_quad < 64 {
        return Err(crate::GeometryError::InvalidParameter(format!(
            "indicatrix quadrature needs at least 64 nodes, got {n_quad}"
        )));
    }
    let h = std::f64::consts::TAU / n_quad as f64;
    let nodes = (0..n_quad)
        .into_par_iter()
        .map(|q| -> Result<(f64, f64)> {
            let th = q as f64 * h;
            let u = [th.cos(), th.sin()];
            let du = [-th.sin(), th.cos()];
            let f = surface.f(x, u);
            let fy = fiber_gradient(surface, x, u)?;
            let rate = (fy[0] * du[0] + fy[1] * du[1]) / (f * f);
            // y(θ) = u/F(x, u)
            let y = [u[0] / f, u[1] / f];
            let dy = [du[0] / f - u[0] * rate, du[1] / f - u[1] * rate];
            let p = BundlePoint::new(x, y)?;
            let speed = metric_jet(surface, &p)?.inner(dy, dy).sqrt();
            let i = FrameJets::new(surface, &p, 3)?.cartan_scalar().value();
            Ok((i * speed, speed))
        })
        .collect::<Result<Vec<_>>>()?;
    let (value, length) = nodes.iter().fold((0.0, 0.0), |(v, l), (a, b)| (v + a * h, l + b * h));
    Ok(IndicatrixMean { value, length })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    pub samples: usize,
    pub min_abs_one_plus_i3: f64,
    pub threshold: f64,
    /// `[x1, x2, y1, y2]` of every flagged point.
    pub degenerate_points: Vec<[f64; 4]>,
}

pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// Scans `1 + I₃`; flags points where it is within the threshold of zero.
pub fn nondegeneracy(surface: &FinslerSurface, points: &[BundlePoint]) -> Result<NondegeneracyReport> {
    let values = points
        .par_iter()
        .map(|p| -> Result<(f64, [f64; 4])> {
            let q = to_sigma(surface, p)?;
            let frame = FrameJets::new(surface, &q, 4)?;
            let i3 = frame.derive(3, &frame.cartan_scalar()).value();
            Ok((1.0 + i3, q.coords()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NondegeneracyReport {
        samples: points.len(),
        min_abs_one_plus_i3: values.iter().map(|v| v.0.abs()).fold(f64::INFINITY, f64::min),
        threshold: DEGENERACY_THRESHOLD,
        degenerate_points: values
            .iter()
            .filter(|v| !(v.0.abs() >= DEGENERACY_THRESHOLD))
            .map(|v| v.1)
            .collect(),
    })
}

/// `max |I₁|` and `max |I₃|` over the points.
pub fn s_surface_scan(surface: &FinslerSurface, points: &[BundlePoint]) -> Result<(f64, f64)> {
    let [i1, i3] = per_point(surface, points, |p| {
        let frame = FrameJets::new(surface, p, 4)?;
        let i = frame.cartan_scalar();
        Ok([frame.derive(1, &i).value(), frame.derive(3, &i).value()])
    })?;
    Ok((i1, i3))
}

/// S-Finsler flag: `I₁` vanishes on the scan while `I₃` does not.
pub fn is_s_surface(max_i1: f64, max_i3: f64) -> bool {
    max_i1 < 1e-7 && max_i3 > 1e-4
}

/// Everything `verify` reports for one surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub fixture: String,
    pub identities: Vec<ResidualReport>,
    #[serde(rename = "mean_I")]
    pub mean_i: IndicatrixMean,
    pub s_surface_flag: bool,
    pub nondegeneracy: NondegeneracyReport,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub max_abs_i1: f64,
    pub max_abs_i3: f64,
    /// `max |K₃ + KI + I₂₂|`; zero on S-surfaces.
    pub s_surface_bianchi: f64,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.identities.iter().all(|r| r.pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySettings {
    pub points: usize,
    pub mean_points: usize,
    pub quadrature: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            points: 100,
            mean_points: 10,
            quadrature: DEFAULT_QUADRATURE,
            tolerances: Tolerances::default(),
            seed: 0,
        }
    }
}

pub fn verify_surface(surface: &FinslerSurface, settings: &VerifySettings) -> Result<VerificationReport> {
    let tol = settings.tolerances;
    let points = sample_points(surface, settings.points, settings.seed)?;
    let mut identities = Vec::new();
    identities.extend(structure_residuals(surface, &points, tol.first_order)?);
    identities.extend(bianchi_residuals(surface, &points, tol.first_order, tol.higher_order)?);
    identities.extend(ricci_residuals(
        surface,
        &FrameScalar::CartanScalar,
        &points,
        tol.higher_order,
    )?);
    identities.extend(ricci_residuals(
        surface,
        &FrameScalar::Curvature,
        &points,
        tol.higher_order,
    )?);
    identities.extend(bracket_residuals(surface, &points, tol.higher_order)?);
    identities.push(cross_path_residual(surface, &points, tol.first_order)?);

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed.wrapping_add(1));
    let mut mean_i: Option<IndicatrixMean> = None;
    for _ in 0..settings.mean_points {
        let x = surface.chart.sample(&mut rng, 0.05);
        let m = indicatrix_mean_i(surface, x, settings.quadrature)?;
        if mean_i.is_none_or(|best| m.relative().is_nan() || m.relative() > best.relative()) {
            mean_i = Some(m);
        }
    }
    let mean_i = mean_i.unwrap_or(IndicatrixMean {
        value: 0.0,
        length: f64::NAN,
    });
    identities.push(ResidualReport::new(
        "indicatrix_mean_I",
        settings.mean_points,
        if settings.mean_points == 0 {
            0.0
        } else {
            worst([mean_i.relative()])
        },
        tol.mean_i,
    ));

    let (max_i1, max_i3) = s_surface_scan(surface, &points)?;
    Ok(VerificationReport {
        fixture: surface.name.clone(),
        identities,
        mean_i,
        s_surface_flag: is_s_surface(max_i1, max_i3),
        nondegeneracy: nondegeneracy(surface, &points)?,
        diagnostics: Diagnostics {
            max_abs_i1: max_i1,
            max_abs_i3: max_i3,
            s_surface_bianchi: s_surface_bianchi_diagnostic(surface, &points)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::surface::{fixture, FIXTURE_NAMES};
    use approx::assert_abs_diff_eq;

    fn pts(s: &FinslerSurface, n: usize) -> Vec<BundlePoint> {
        sample_points(s, n, 7).unwrap()
    }

    #[test]
    fn euclidean_structure_is_flat() {
        let s = fixture("euclidean").unwrap();
        for r in structure_residuals(&s, &pts(&s, 10), 1e-10).unwrap() {
            assert!(r.pass, "{r:?}");
        }
        let br = bracket_residuals(&s, &pts(&s, 10), 1e-9).unwrap();
        assert!(br[1].max_residual < 1e-12);
    }

    #[test]
    fn structure_equations_on_curved_fixtures() {
        for (name, tol) in [("sphere", 1e-7), ("randers_nonberwald", 1e-6)] {
            let s = fixture(name).unwrap();
            for r in structure_residuals(&s, &pts(&s, 20), tol).unwrap() {
                assert!(r.pass, "{name}: {r:?}");
            }
        }
    }

    #[test]
    fn bianchi_examples() {
        let s = fixture("sphere").unwrap();
        for r in bianchi_residuals(&s, &pts(&s, 10), 1e-8, 1e-8).unwrap() {
            assert!(r.pass, "{r:?}");
        }
        let s = fixture("randers_nonberwald").unwrap();
        let [a, b] = bianchi_residuals(&s, &pts(&s, 10), 1e-7, 1e-5).unwrap();
        assert!(a.pass && b.pass, "{a:?} {b:?}");
    }

    #[test]
    fn ricci_examples() {
        let s = fixture("sphere").unwrap();
        for r in ricci_residuals(&s, &FrameScalar::Constant(3.0), &pts(&s, 5), 1e-14).unwrap() {
            assert_eq!(r.max_residual, 0.0);
        }
        for r in ricci_residuals(&s, &FrameScalar::Curvature, &pts(&s, 5), 1e-8).unwrap() {
            assert!(r.pass, "{r:?}");
        }
        let s = fixture("randers_nonberwald").unwrap();
        for f in [
            FrameScalar::CartanScalar,
            FrameScalar::Field(Expr::parse("x1 * y2 + sin(x2)").unwrap()),
        ] {
            for r in ricci_residuals(&s, &f, &pts(&s, 10), 1e-5).unwrap() {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn bracket_examples() {
        for name in ["sphere", "randers_nonberwald"] {
            let s = fixture(name).unwrap();
            for r in bracket_residuals(&s, &pts(&s, 10), 1e-6).unwrap() {
                assert!(r.pass, "{name}: {r:?}");
            }
        }
    }

    #[test]
    fn indicatrix_mean_examples() {
        let e = indicatrix_mean_i(&fixture("euclidean").unwrap(), [0.3, 0.1], 512).unwrap();
        assert!(e.value.abs() < 1e-14);
        assert_abs_diff_eq!(e.length, std::f64::consts::TAU, epsilon = 1e-12);

        let s = fixture("sphere").unwrap();
        let x = [1.0, 0.5];
        let m = indicatrix_mean_i(&s, x, 512).unwrap();
        assert!(m.value.abs() < 1e-12);
        assert_abs_diff_eq!(m.length, std::f64::consts::TAU, epsilon = 1e-10);

        let r = indicatrix_mean_i(&fixture("randers_minkowski").unwrap(), [0.0, 0.0], 512).unwrap();
        assert!(r.relative() < 1e-6, "{r:?}");

        assert!(indicatrix_mean_i(&s, x, 16).is_err());
    }

    #[test]
    fn nondegeneracy_examples() {
        let s = fixture("poincare_disk").unwrap();
        let r = nondegeneracy(&s, &pts(&s, 20)).unwrap();
        assert_abs_diff_eq!(r.min_abs_one_plus_i3, 1.0, epsilon = 1e-10);
        assert!(r.degenerate_points.is_empty());
    }

    #[test]
    fn riemannian_and_minkowski_fixtures_are_not_s_surfaces_but_pass() {
        // I₃ vanishes on Riemannian fixtures, so the flag stays off.
        let s = fixture("sphere").unwrap();
        let (i1, i3) = s_surface_scan(&s, &pts(&s, 10)).unwrap();
        assert!(!is_s_surface(i1, i3));
        let s = fixture("randers_minkowski").unwrap();
        let (i1, i3) = s_surface_scan(&s, &pts(&s, 10)).unwrap();
        assert!(is_s_surface(i1, i3), "{i1} {i3}");
    }

    #[test]
    fn every_fixture_verifies() {
        let settings = VerifySettings {
            points: 20,
            mean_points: 2,
            ..VerifySettings::default()
        };
        for name in FIXTURE_NAMES {
            let r = verify_surface(&fixture(name).unwrap(), &settings).unwrap();
            let failed: Vec<_> = r.identities.iter().filter(|i| !i.pass).collect();
            assert!(failed.is_empty(), "{name}: {failed:?}");
        }
    }
}
