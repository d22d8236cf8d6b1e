//! Fundamental tensor, Cartan tensor, geodesic spray, nonlinear connection
//! and Chern connection coefficients.
//!
//! Conventions (index order follows the math):
//!
//! * `g_ij = ½ ∂²F²/∂y^i∂y^j`, `A_ijk = (F/2) ∂g_ij/∂y^k`
//! * `G^i = ¼ g^{il} (∂²F²/∂y^l∂x^k · y^k − ∂F²/∂x^l)`, geodesics solve `ẍ + 2G(x, ẋ) = 0`
//! * `𝒩^i_j = ∂G^i/∂y^j`, `δ/δx^j = ∂/∂x^j − 𝒩^m_j ∂/∂y^m`
//! * `Γ^i_jk = ½ g^{il} (δ_j g_lk + δ_k g_jl − δ_l g_jk)`
//!
//! Everything is computed once on jets around the base point, so every
//! quantity comes with as many exact derivatives as the evaluation degree
//! leaves room for.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{BundlePoint, Jet, ScalarField};
use crate::error::{GeometryError, Result};
use crate::surface::FinslerSurface;

pub type Mat2 = [[f64; 2]; 2];
pub type Tensor3 = [[[f64; 2]; 2]; 2];

/// Coordinate index of `x^i` and `y^i` among the bundle coordinates.
pub const fn dx(i: usize) -> usize {
    i
}
pub const fn dy(i: usize) -> usize {
    2 + i
}

/// Metric data on jets around one bundle point.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub point: BundlePoint,
    pub degree: usize,
    pub y: [Jet; 2],
    pub f: Jet,
    pub f_y: [Jet; 2],
    pub g: [[Jet; 2]; 2],
    pub det_g: Jet,
    pub g_inv: [[Jet; 2]; 2],
    pub cartan: [[[Jet; 2]; 2]; 2],
    pub spray: [Jet; 2],
    /// `nonlinear[i][j] = 𝒩^i_j`.
    pub nonlinear: [[Jet; 2]; 2],
    /// `chern[i][j][k] = Γ^i_jk`.
    pub chern: [[[Jet; 2]; 2]; 2],
}

/// Smallest eigenvalue of a symmetric 2×2 matrix.
pub fn min_eigenvalue(m: &Mat2) -> f64 {
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let off = 0.5 * (m[0][1] + m[1][0]);
    half_tr - half_diff.hypot(off)
}

fn mat_values(m: &[[Jet; 2]; 2]) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].value()))
}

fn tensor_values(t: &[[[Jet; 2]; 2]; 2]) -> Tensor3 {
    std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| t[i][j][k].value())))
}

impl LocalGeometry {
    /// Lowest degree at which every field of this struct has a value.
    pub const MIN_DEGREE: usize = 3;

    pub fn new(surface: &FinslerSurface, p: &BundlePoint, degree: usize) -> Result<Self> {
        assert!(
            (Self::MIN_DEGREE..=crate::engine::MAX_DEGREE).contains(&degree),
            "LocalGeometry degree must lie in {}..={}",
            Self::MIN_DEGREE,
            crate::engine::MAX_DEGREE
        );
        surface.check_point(p)?;
        let [x1, x2, y1, y2] = Jet::seed(p.coords(), degree);
        let y = [y1, y2];
        let f = ScalarField::eval(surface, [x1, x2], y.clone());
        if !f.is_finite() || f.value() <= 0.0 {
            return Err(GeometryError::NonFinite { context: "F" });
        }
        let e = &f * &f;
        let f_y = [f.partial(dy(0)), f.partial(dy(1))];
        let e_y = [e.partial(dy(0)), e.partial(dy(1))];
        let g: [[Jet; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| e_y[i].partial(dy(j)) * 0.5));

        let gv = mat_values(&g);
        let lambda = min_eigenvalue(&gv);
        if !(lambda > 0.0) {
            return Err(GeometryError::NotStronglyConvex {
                x: p.x,
                y: p.y,
                min_eigenvalue: lambda,
            });
        }

        let det_g = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
        let inv_det = det_g.recip();
        let g_inv = [
            [&g[1][1] * &inv_det, -(&g[0][1] * &inv_det)],
            [-(&g[1][0] * &inv_det), &g[0][0] * &inv_det],
        ];

        let g_y: [[[Jet; 2]; 2]; 2] =
            std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| g[i][j].partial(dy(k)))));
        let half_f = &f * 0.5;
        let cartan = std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| &half_f * &g_y[i][j][k])));

        // w_l = ∂²E/∂y^l∂x^k y^k − ∂E/∂x^l
        let w: [Jet; 2] = std::array::from_fn(|l| {
            let mixed = &(&e_y[l].partial(dx(0)) * &y[0]) + &(&e_y[l].partial(dx(1)) * &y[1]);
            mixed - e.partial(dx(l))
        });
        let spray: [Jet; 2] = std::array::from_fn(|i| (&(&g_inv[i][0] * &w[0]) + &(&g_inv[i][1] * &w[1])) * 0.25);
        let nonlinear: [[Jet; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| spray[i].partial(dy(j))));

        // delta_g[a][i][j] = δ_a g_ij
        let delta_g: [[[Jet; 2]; 2]; 2] = std::array::from_fn(|a| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let horizontal = &nonlinear[0][a] * &g_y[i][j][0] + &nonlinear[1][a] * &g_y[i][j][1];
                    g[i][j].partial(dx(a)) - horizontal
                })
            })
        });
        let chern = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| {
                    let mut acc = Jet::constant(0.0);
                    for l in 0..2 {
                        let bracket = &(&delta_g[j][l][k] + &delta_g[k][j][l]) - &delta_g[l][j][k];
                        acc += &g_inv[i][l] * &bracket;
                    }
                    acc * 0.5
                })
            })
        });

        let geom = LocalGeometry {
            point: *p,
            degree,
            y,
            f,
            f_y,
            g,
            det_g,
            g_inv,
            cartan,
            spray,
            nonlinear,
            chern,
        };
        if !geom.nonlinear.iter().flatten().all(Jet::is_finite) {
            return Err(GeometryError::NonFinite {
                context: "nonlinear connection",
            });
        }
        Ok(geom)
    }

    pub fn metric(&self) -> MetricJet {
        MetricJet {
            g: mat_values(&self.g),
            g_inv: mat_values(&self.g_inv),
            det_g: self.det_g.value(),
            cartan: tensor_values(&self.cartan),
        }
    }

    pub fn connection(&self) -> ConnectionJet {
        ConnectionJet {
            spray: [self.spray[0].value(), self.spray[1].value()],
            nonlinear: mat_values(&self.nonlinear),
            chern: tensor_values(&self.chern),
        }
    }
}

/// `g_ij`, its inverse and determinant, and the Cartan tensor at a point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricJet {
    pub g: Mat2,
    pub g_inv: Mat2,
    pub det_g: f64,
    pub cartan: Tensor3,
}

impl MetricJet {
    /// `g(u, v)`.
    pub fn inner(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += self.g[i][j] * u[i] * v[j];
            }
        }
        s
    }

    /// `A(u, v, w)`.
    pub fn cartan_form(&self, u: [f64; 2], v: [f64; 2], w: [f64; 2]) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    s += self.cartan[i][j][k] * u[i] * v[j] * w[k];
                }
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectionJet {
    pub spray: [f64; 2],
    /// `nonlinear[i][j] = 𝒩^i_j`.
    pub nonlinear: Mat2,
    /// `chern[i][j][k] = Γ^i_jk`.
    pub chern: Tensor3,
}

pub fn metric_jet(surface: &FinslerSurface, p: &BundlePoint) -> Result<MetricJet> {
    Ok(LocalGeometry::new(surface, p, LocalGeometry::MIN_DEGREE)?.metric())
}

pub fn spray_and_connections(surface: &FinslerSurface, p: &BundlePoint) -> Result<ConnectionJet> {
    Ok(LocalGeometry::new(surface, p, LocalGeometry::MIN_DEGREE)?.connection())
}

/// Spray coefficients `G^i(x, v)` only; cheaper than a full [`LocalGeometry`].
pub fn spray_at(surface: &FinslerSurface, x: [f64; 2], v: [f64; 2]) -> Result<[f64; 2]> {
    let p = BundlePoint::new(x, v)?;
    surface.check_point(&p)?;
    let [x1, x2, y1, y2] = Jet::seed(p.coords(), 2);
    let y = [y1, y2];
    let f = ScalarField::eval(surface, [x1, x2], y.clone());
    let e = &f * &f;
    let e_y = [e.partial(dy(0)), e.partial(dy(1))];
    let g: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * e_y[i].partial(dy(j)).value()));
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(min_eigenvalue(&g) > 0.0) {
        return Err(GeometryError::NotStronglyConvex {
            x,
            y: v,
            min_eigenvalue: min_eigenvalue(&g),
        });
    }
    let inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let w: [f64; 2] = std::array::from_fn(|l| {
        e_y[l].partial(dx(0)).value() * v[0] + e_y[l].partial(dx(1)).value() * v[1] - e.partial(dx(l)).value()
    });
    let spray = [
        0.25 * (inv[0][0] * w[0] + inv[0][1] * w[1]),
        0.25 * (inv[1][0] * w[0] + inv[1][1] * w[1]),
    ];
    if spray.iter().all(|s| s.is_finite()) {
        Ok(spray)
    } else {
        Err(GeometryError::NonFinite { context: "spray" })
    }
}

/// `∂F/∂y^i` at a point.
pub fn fiber_gradient(surface: &FinslerSurface, x: [f64; 2], y: [f64; 2]) -> Result<[f64; 2]> {
    let [x1, x2, y1, y2] = Jet::seed([x[0], x[1], y[0], y[1]], 1);
    let f = ScalarField::eval(surface, [x1, x2], [y1, y2]);
    let grad = [f.partial(dy(0)).value(), f.partial(dy(1)).value()];
    if grad.iter().all(|v| v.is_finite()) {
        Ok(grad)
    } else {
        Err(GeometryError::NonFinite { context: "F_y" })
    }
}

/// One pass/fail line of a [`ValidationReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub value: f64,
    pub pass: bool,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub surface: String,
    pub samples: usize,
    pub max_homogeneity_residual: f64,
    pub min_g_eigenvalue: f64,
    pub max_b_norm: Option<f64>,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}: {}", c.name, c.message))
            .collect()
    }
}

pub const HOMOGENEITY_TOLERANCE: f64 = 1e-9;

/// Samples chart × directions and checks positivity, 1-homogeneity,
/// strong convexity and, for Randers metrics, `‖b‖_a < 1`.
pub fn validate_surface(surface: &FinslerSurface, n_samples: usize, seed: u64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_f = f64::INFINITY;
    let mut max_hom: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut max_b: Option<f64> = None;
    let mut convexity_error = None;

    let mut checks = Vec::new();
    if let Err(msg) = surface.check_definition() {
        checks.push(ValidationCheck {
            name: "definition",
            value: f64::NAN,
            pass: false,
            message: msg,
        });
    }

    for i in 0..n_samples {
        let x = surface.chart.sample(&mut rng, 0.01);
        // Every other sample probes an axis or diagonal, where non-smooth norms tend to degenerate.
        let th = if i % 2 == 0 {
            std::f64::consts::TAU * rng.gen::<f64>()
        } else {
            std::f64::consts::FRAC_PI_4 * ((i / 2) % 8) as f64
        };
        let y = [th.cos(), th.sin()];
        let f = surface.f(x, y);
        min_f = min_f.min(if f.is_finite() { f } else { f64::NEG_INFINITY });
        for lambda in [0.5, 2.0, 7.0] {
            let scaled = surface.f(x, [lambda * y[0], lambda * y[1]]);
            let r = (scaled - lambda * f).abs() / (lambda * f.abs());
            max_hom = max_hom.max(if r.is_finite() { r } else { f64::INFINITY });
        }
        if let Some(b) = surface.randers_b_norm(x) {
            max_b = Some(max_b.map_or(b, |m: f64| m.max(b)));
        }
        match BundlePoint::new(x, y).and_then(|p| metric_jet(surface, &p)) {
            Ok(m) => min_eig = min_eig.min(min_eigenvalue(&m.g)),
            Err(GeometryError::NotStronglyConvex { min_eigenvalue, .. }) => min_eig = min_eig.min(min_eigenvalue),
            Err(e) => {
                min_eig = f64::NEG_INFINITY;
                convexity_error.get_or_insert(e.to_string());
            }
        }
    }

    checks.push(ValidationCheck {
        name: "positivity",
        value: min_f,
        pass: min_f > 0.0,
        message: format!("min F over sampled directions = {min_f:e}"),
    });
    checks.push(ValidationCheck {
        name: "homogeneity",
        value: max_hom,
        pass: max_hom <= HOMOGENEITY_TOLERANCE,
        message: format!("max |F(x, λy) − λF(x, y)| / λF = {max_hom:e}"),
    });
    checks.push(ValidationCheck {
        name: "strong_convexity",
        value: min_eig,
        pass: min_eig > 0.0,
        message: convexity_error.unwrap_or_else(|| format!("min eigenvalue of g = {min_eig:e}")),
    });
    if let Some(b) = max_b {
        checks.push(ValidationCheck {
            name: "randers_b_norm",
            value: b,
            pass: b < 1.0,
            message: if b < 1.0 {
                format!("max b-norm = {b}")
            } else {
                format!("b-norm ≥ 1 (max {b})")
            },
        });
    }

    ValidationReport {
        surface: surface.name.clone(),
        samples: n_samples,
        max_homogeneity_residual: max_hom,
        min_g_eigenvalue: min_eig,
        max_b_norm: max_b,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::surface::{fixture, Family, SymmetricField, FIXTURE_NAMES};
    use approx::assert_abs_diff_eq;

    fn pt(x: [f64; 2], y: [f64; 2]) -> BundlePoint {
        BundlePoint::new(x, y).unwrap()
    }

    /// Closed-form Randers fundamental tensor:
    /// g_ij = (F/α)(a_ij − y_i y_j/α²) + F_{y^i} F_{y^j} with a = δ.
    fn randers_g(b: [f64; 2], y: [f64; 2]) -> Mat2 {
        let alpha = (y[0] * y[0] + y[1] * y[1]).sqrt();
        let f = alpha + b[0] * y[0] + b[1] * y[1];
        let fy = [y[0] / alpha + b[0], y[1] / alpha + b[1]];
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let delta = if i == j { 1.0 } else { 0.0 };
                (f / alpha) * (delta - y[i] * y[j] / (alpha * alpha)) + fy[i] * fy[j]
            })
        })
    }

    #[test]
    fn euclidean_metric_is_identity_with_no_cartan_tensor() {
        let s = fixture("euclidean").unwrap();
        let m = metric_jet(&s, &pt([0.3, -0.2], [0.6, 1.7])).unwrap();
        assert_abs_diff_eq!(m.g[0][0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.g[0][1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.g[1][1], 1.0, epsilon = 1e-14);
        assert!(m.cartan.iter().flatten().flatten().all(|a| a.abs() < 1e-14));
    }

    #[test]
    fn randers_metric_matches_closed_form() {
        let s = fixture("randers_minkowski").unwrap();
        let m = metric_jet(&s, &pt([0.0, 0.0], [1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(m.g[0][0], 1.69, epsilon = 1e-13);
        assert_abs_diff_eq!(m.g[1][1], 1.3, epsilon = 1e-13);
        assert_abs_diff_eq!(m.g[0][1], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(m.det_g, 2.197, epsilon = 1e-12);

        for y in [[0.4, 0.9], [-1.0, 0.2], [0.1, -0.3]] {
            let m = metric_jet(&s, &pt([0.5, 0.5], y)).unwrap();
            let want = randers_g([0.3, 0.0], y);
            for i in 0..2 {
                for j in 0..2 {
                    assert_abs_diff_eq!(m.g[i][j], want[i][j], epsilon = 1e-12);
                }
            }
            // det g = (F/α)³ det a in dimension two
            let alpha = (y[0] * y[0] + y[1] * y[1]).sqrt();
            let ratio = (alpha + 0.3 * y[0]) / alpha;
            assert_abs_diff_eq!(m.det_g, ratio.powi(3), epsilon = 1e-12);
        }
    }

    #[test]
    fn riemannian_cartan_tensor_vanishes() {
        for name in ["sphere", "poincare_disk"] {
            let s = fixture(name).unwrap();
            let m = metric_jet(&s, &pt([0.6, 0.3], [0.2, -0.7])).unwrap();
            assert!(m.cartan.iter().flatten().flatten().all(|a| a.abs() < 1e-12), "{name}");
        }
    }

    #[test]
    fn inverse_and_homogeneity_invariants() {
        let s = fixture("randers_nonberwald").unwrap();
        for (x, y) in [([0.2, 0.7], [0.3, 0.4]), ([-0.5, -0.1], [-1.0, 0.6])] {
            let m = metric_jet(&s, &pt(x, y)).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let prod: f64 = (0..2).map(|k| m.g[i][k] * m.g_inv[k][j]).sum();
                    assert_abs_diff_eq!(prod, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
                }
            }
            // A(y, ·, ·) = 0 and total symmetry
            for j in 0..2 {
                for k in 0..2 {
                    let c: f64 = (0..2).map(|i| m.cartan[i][j][k] * y[i]).sum();
                    assert!(c.abs() < 1e-12);
                    assert_abs_diff_eq!(m.cartan[0][j][k], m.cartan[j][0][k], epsilon = 1e-13);
                    assert_abs_diff_eq!(m.cartan[j][k][0], m.cartan[j][0][k], epsilon = 1e-13);
                }
            }
            // Euler: g(y, y) = F²
            let f = s.f(x, y);
            assert_abs_diff_eq!(m.inner(y, y), f * f, epsilon = 1e-12);
        }
    }

    #[test]
    fn locally_minkowski_connection_vanishes() {
        let s = fixture("randers_minkowski").unwrap();
        let c = spray_and_connections(&s, &pt([0.4, 0.1], [0.7, -0.2])).unwrap();
        assert!(c.spray.iter().all(|v| v.abs() < 1e-14));
        assert!(c.nonlinear.iter().flatten().all(|v| v.abs() < 1e-14));
        assert!(c.chern.iter().flatten().flatten().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn riemannian_chern_coefficients_are_christoffel_symbols() {
        for name in ["sphere", "poincare_disk"] {
            let s = fixture(name).unwrap();
            let oracle = s.closed_form.unwrap().christoffel;
            for (x, y) in [
                ([0.7, 0.2], [1.0, 0.5]),
                ([0.4, -0.3], [-0.2, 0.9]),
                ([0.5, 0.1], [0.3, 0.3]),
            ] {
                let c = spray_and_connections(&s, &pt(x, y)).unwrap();
                let want = oracle(x);
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            assert_abs_diff_eq!(c.chern[i][j][k], want[i][j][k], epsilon = 1e-8);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spray_and_nonlinear_connection_homogeneity() {
        let s = fixture("randers_nonberwald").unwrap();
        let p = pt([0.1, 0.6], [0.8, -0.3]);
        let c1 = spray_and_connections(&s, &p).unwrap();
        let c2 = spray_and_connections(&s, &p.scaled(2.0)).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(
                c2.spray[i],
                4.0 * c1.spray[i],
                epsilon = 1e-8 * c1.spray[i].abs().max(1.0)
            );
            for j in 0..2 {
                assert_abs_diff_eq!(c2.nonlinear[i][j], 2.0 * c1.nonlinear[i][j], epsilon = 1e-8);
                for k in 0..2 {
                    assert_abs_diff_eq!(c1.chern[i][j][k], c1.chern[i][k][j], epsilon = 1e-9);
                    assert_abs_diff_eq!(c2.chern[i][j][k], c1.chern[i][j][k], epsilon = 1e-9);
                }
            }
        }
        let direct = spray_at(&s, p.x, p.y).unwrap();
        assert_abs_diff_eq!(direct[0], c1.spray[0], epsilon = 1e-14);
        assert_abs_diff_eq!(direct[1], c1.spray[1], epsilon = 1e-14);
    }

    #[test]
    fn validation_examples() {
        let r = validate_surface(&fixture("euclidean").unwrap(), 64, 1);
        assert!(r.pass());
        assert_abs_diff_eq!(r.min_g_eigenvalue, 1.0, epsilon = 1e-12);

        let r = validate_surface(&fixture("randers_minkowski").unwrap(), 64, 1);
        assert!(r.pass());
        assert_abs_diff_eq!(r.max_b_norm.unwrap(), 0.3, epsilon = 1e-15);

        let broken = FinslerSurface::new(
            "broken",
            crate::surface::ChartDomain::Rect {
                x1: [-1.0, 1.0],
                x2: [-1.0, 1.0],
            },
            Family::Randers {
                a: SymmetricField::identity(),
                b: [Expr::constant(1.1), Expr::constant(0.0)],
            },
        );
        let r = validate_surface(&broken, 64, 1);
        assert!(!r.pass());
        assert!(r.failures().iter().any(|m| m.contains("b-norm ≥ 1")));

        // The quartic norm is flat along the axes.
        let quartic = FinslerSurface::new(
            "quartic",
            crate::surface::ChartDomain::Rect {
                x1: [-1.0, 1.0],
                x2: [-1.0, 1.0],
            },
            Family::Minkowski {
                norm: Expr::parse("(y1^4 + y2^4)^0.25").unwrap(),
            },
        );
        let r = validate_surface(&quartic, 16, 1);
        assert!(r.failures().iter().any(|m| m.contains("convex")), "{:?}", r.failures());
    }

    #[test]
    fn every_fixture_validates() {
        for name in FIXTURE_NAMES {
            let r = validate_surface(&fixture(name).unwrap(), 128, 3);
            assert!(r.pass(), "{name}: {:?}", r.failures());
        }
    }

    #[test]
    fn outside_chart_is_an_error() {
        let s = fixture("poincare_disk").unwrap();
        assert!(matches!(
            metric_jet(&s, &pt([0.95, 0.0], [1.0, 0.0])),
            Err(GeometryError::OutsideChart { .. })
        ));
    }
}
