//! Finsler surface descriptions, the shipped metric zoo, and sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{BundlePoint, Scalar, ScalarField};
use crate::error::{GeometryError, Result};
use crate::expr::Expr;

/// Single coordinate chart the surface lives on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartDomain {
    Rect { x1: [f64; 2], x2: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

impl ChartDomain {
    pub fn contains(&self, x: [f64; 2]) -> bool {
        match self {
            ChartDomain::Rect { x1, x2 } => x1[0] < x[0] && x[0] < x1[1] && x2[0] < x[1] && x[1] < x2[1],
            ChartDomain::Disk { center, radius } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                dx * dx + dy * dy < radius * radius
            }
        }
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            ChartDomain::Rect { x1, x2 } => (*x1, *x2),
            ChartDomain::Disk { center, radius } => (
                [center[0] - radius, center[0] + radius],
                [center[1] - radius, center[1] + radius],
            ),
        }
    }

    /// Uniform sample from the domain shrunk by `inset` (fraction of its size).
    pub fn sample<R: Rng>(&self, rng: &mut R, inset: f64) -> [f64; 2] {
        let keep = 1.0 - inset;
        match self {
            ChartDomain::Rect { x1, x2 } => {
                let u = |r: &mut R, lo: f64, hi: f64| {
                    let mid = 0.5 * (lo + hi);
                    let half = 0.5 * (hi - lo) * keep;
                    mid + half * (2.0 * r.gen::<f64>() - 1.0)
                };
                [u(rng, x1[0], x1[1]), u(rng, x2[0], x2[1])]
            }
            ChartDomain::Disk { center, radius } => {
                let r = radius * keep * rng.gen::<f64>().sqrt();
                let th = std::f64::consts::TAU * rng.gen::<f64>();
                [center[0] + r * th.cos(), center[1] + r * th.sin()]
            }
        }
    }

    /// Cell centres of an `n1 × n2` grid over the bounding box, restricted to the domain.
    pub fn grid(&self, n1: usize, n2: usize) -> Vec<[f64; 2]> {
        let (b1, b2) = self.bounding_box();
        let mut out = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let x = [
                    b1[0] + (b1[1] - b1[0]) * (i as f64 + 0.5) / n1 as f64,
                    b2[0] + (b2[1] - b2[0]) * (j as f64 + 0.5) / n2 as f64,
                ];
                if self.contains(x) {
                    out.push(x);
                }
            }
        }
        out
    }
}

/// Symmetric 2×2 field `a_ij(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricField {
    pub a11: Expr,
    pub a12: Expr,
    pub a22: Expr,
}

impl SymmetricField {
    pub fn identity() -> Self {
        SymmetricField {
            a11: Expr::constant(1.0),
            a12: Expr::constant(0.0),
            a22: Expr::constant(1.0),
        }
    }

    pub fn parse(a11: &str, a12: &str, a22: &str) -> std::result::Result<Self, crate::expr::ExprError> {
        Ok(SymmetricField {
            a11: Expr::parse(a11)?,
            a12: Expr::parse(a12)?,
            a22: Expr::parse(a22)?,
        })
    }

    fn at<T: Scalar>(&self, z: &[T; 4]) -> [[T; 2]; 2] {
        let a12 = self.a12.eval(z);
        [[self.a11.eval(z), a12.clone()], [a12, self.a22.eval(z)]]
    }

    pub fn at_f64(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        self.at(&[x[0], x[1], 0.0, 0.0])
    }

    fn quadratic<T: Scalar>(&self, z: &[T; 4], y: &[T; 2]) -> T {
        let a = self.at(z);
        a[0][0].clone() * y[0].clone() * y[0].clone()
            + a[0][1].clone() * y[0].clone() * y[1].clone() * 2.0
            + a[1][1].clone() * y[1].clone() * y[1].clone()
    }

    fn references_y(&self) -> bool {
        [&self.a11, &self.a12, &self.a22].iter().any(|e| e.references(&[2, 3]))
    }
}

/// Family tag plus the data defining `F`.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `F = √(a_ij y^i y^j)`.
    Riemannian { a: SymmetricField },
    /// `F = √(a_ij y^i y^j) + b_i y^i`.
    Randers { a: SymmetricField, b: [Expr; 2] },
    /// `F = norm(y)`, independent of position.
    Minkowski { norm: Expr },
    /// Arbitrary `F(x, y)`.
    Custom { f: Expr },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Riemannian { .. } => "riemannian",
            Family::Randers { .. } => "randers",
            Family::Minkowski { .. } => "minkowski",
            Family::Custom { .. } => "custom",
        }
    }
}

/// Closed-form data for Riemannian fixtures, used only as cross-checks.
#[derive(Clone, Copy, Debug)]
pub struct ClosedForm {
    pub gauss_curvature: fn([f64; 2]) -> f64,
    /// `christoffel(x)[i][j][k] = γ^i_jk(x)`.
    pub christoffel: fn([f64; 2]) -> [[[f64; 2]; 2]; 2],
}

#[derive(Clone, Debug)]
pub struct FinslerSurface {
    pub name: String,
    pub chart: ChartDomain,
    pub family: Family,
    pub closed_form: Option<ClosedForm>,
}

impl ScalarField for FinslerSurface {
    fn eval<T: Scalar>(&self, x: [T; 2], y: [T; 2]) -> T {
        let [x1, x2] = x;
        let z = [x1, x2, y[0].clone(), y[1].clone()];
        match &self.family {
            Family::Riemannian { a } => a.quadratic(&z, &y).sqrt(),
            Family::Randers { a, b } => {
                a.quadratic(&z, &y).sqrt() + b[0].eval(&z) * y[0].clone() + b[1].eval(&z) * y[1].clone()
            }
            Family::Minkowski { norm } => norm.eval(&z),
            Family::Custom { f } => f.eval(&z),
        }
    }

    fn contains(&self, x: [f64; 2]) -> bool {
        self.chart.contains(x)
    }
}

impl FinslerSurface {
    pub fn new(name: impl Into<String>, chart: ChartDomain, family: Family) -> Self {
        FinslerSurface {
            name: name.into(),
            chart,
            family,
            closed_form: None,
        }
    }

    pub fn f(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        ScalarField::eval(self, x, y)
    }

    pub fn check_point(&self, p: &BundlePoint) -> Result<()> {
        if !self.chart.contains(p.x) {
            return Err(GeometryError::OutsideChart { x: p.x });
        }
        Ok(())
    }

    /// Scales `v` onto the indicatrix at `x`.
    pub fn to_indicatrix(&self, x: [f64; 2], v: [f64; 2]) -> Result<[f64; 2]> {
        let f = self.f(x, v);
        if !(f.is_finite() && f > 0.0) {
            return Err(GeometryError::NonFinite {
                context: "F on indicatrix normalisation",
            });
        }
        Ok([v[0] / f, v[1] / f])
    }

    /// Random point of the indicatrix bundle `Σ` (so `F(x, y) = 1`).
    pub fn sample_sigma<R: Rng>(&self, rng: &mut R) -> Result<BundlePoint> {
        let x = self.chart.sample(rng, 0.05);
        let th = std::f64::consts::TAU * rng.gen::<f64>();
        let y = self.to_indicatrix(x, [th.cos(), th.sin()])?;
        BundlePoint::new(x, y)
    }

    /// Randers data `(a_ij, b_i)` at `x`, if the surface is a Randers metric.
    pub fn randers_b_norm(&self, x: [f64; 2]) -> Option<f64> {
        match &self.family {
            Family::Randers { a, b } => {
                let z = [x[0], x[1], 0.0, 0.0];
                let a = a.at_f64(x);
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
                let b = [b[0].eval_f64(&z), b[1].eval_f64(&z)];
                let mut s = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        s += inv[i][j] * b[i] * b[j];
                    }
                }
                Some(s.sqrt())
            }
            _ => None,
        }
    }

    /// Structural checks on the definition itself (not on sampled values).
    pub fn check_definition(&self) -> std::result::Result<(), String> {
        match &self.family {
            Family::Riemannian { a } | Family::Randers { a, .. } if a.references_y() => {
                Err("a_ij may depend on x1, x2 only".into())
            }
            Family::Randers { b, .. } if b.iter().any(|e| e.references(&[2, 3])) => {
                Err("b_i may depend on x1, x2 only".into())
            }
            Family::Minkowski { norm } if norm.references(&[0, 1]) => {
                Err("a Minkowski norm may depend on y1, y2 only".into())
            }
            _ => Ok(()),
        }
    }
}

/// Names of the shipped fixtures.
pub const FIXTURE_NAMES: [&str; 5] = [
    "euclidean",
    "sphere",
    "poincare_disk",
    "randers_minkowski",
    "randers_nonberwald",
];

/// Slope of `b = (ε x², 0)` in the non-Berwald Randers fixture.
pub const NON_BERWALD_EPSILON: f64 = 0.2;
/// Constant wind of the Randers–Minkowski fixture.
pub const MINKOWSKI_WIND: f64 = 0.3;

fn flat_christoffel(_: [f64; 2]) -> [[[f64; 2]; 2]; 2] {
    [[[0.0; 2]; 2]; 2]
}

fn sphere_christoffel(x: [f64; 2]) -> [[[f64; 2]; 2]; 2] {
    // (θ, φ): γ^θ_φφ = −sinθ cosθ, γ^φ_θφ = γ^φ_φθ = cotθ
    let (s, c) = x[0].sin_cos();
    let mut g = [[[0.0; 2]; 2]; 2];
    g[0][1][1] = -s * c;
    g[1][0][1] = c / s;
    g[1][1][0] = c / s;
    g
}

fn poincare_christoffel(x: [f64; 2]) -> [[[f64; 2]; 2]; 2] {
    // a = λ² δ with λ = 2/(1 − |x|²): γ^k_ij = δ_ik ∂_j lnλ + δ_jk ∂_i lnλ − δ_ij ∂_k lnλ
    let r2 = x[0] * x[0] + x[1] * x[1];
    let dl = [2.0 * x[0] / (1.0 - r2), 2.0 * x[1] / (1.0 - r2)];
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    std::array::from_fn(|k| {
        std::array::from_fn(|i| std::array::from_fn(|j| d(i, k) * dl[j] + d(j, k) * dl[i] - d(i, j) * dl[k]))
    })
}

fn parse(src: &str) -> Expr {
    Expr::parse(src).expect("fixture expressions are valid")
}

/// Looks up a shipped fixture by name.
pub fn fixture(name: &str) -> Option<FinslerSurface> {
    let surface = match name {
        "euclidean" => FinslerSurface {
            name: name.into(),
            chart: ChartDomain::Rect {
                x1: [-2.0, 2.0],
                x2: [-2.0, 2.0],
            },
            family: Family::Riemannian {
                a: SymmetricField::identity(),
            },
            closed_form: Some(ClosedForm {
                gauss_curvature: |_| 0.0,
                christoffel: flat_christoffel,
            }),
        },
        // Unit sphere in (θ, φ); the chart is a strip avoiding the poles.
        "sphere" => FinslerSurface {
            name: name.into(),
            chart: ChartDomain::Rect {
                x1: [0.15, std::f64::consts::PI - 0.15],
                x2: [-10.0, 10.0],
            },
            family: Family::Riemannian {
                a: SymmetricField {
                    a11: Expr::constant(1.0),
                    a12: Expr::constant(0.0),
                    a22: parse("sin(x1)^2"),
                },
            },
            closed_form: Some(ClosedForm {
                gauss_curvature: |_| 1.0,
                christoffel: sphere_christoffel,
            }),
        },
        "poincare_disk" => FinslerSurface {
            name: name.into(),
            chart: ChartDomain::Disk {
                center: [0.0, 0.0],
                radius: 0.9,
            },
            family: Family::Riemannian {
                a: SymmetricField {
                    a11: parse("4/(1 - x1^2 - x2^2)^2"),
                    a12: Expr::constant(0.0),
                    a22: parse("4/(1 - x1^2 - x2^2)^2"),
                },
            },
            closed_form: Some(ClosedForm {
                gauss_curvature: |_| -1.0,
                christoffel: poincare_christoffel,
            }),
        },
        "randers_minkowski" => FinslerSurface {
            name: name.into(),
            chart: ChartDomain::Rect {
                x1: [-2.0, 2.0],
                x2: [-2.0, 2.0],
            },
            family: Family::Randers {
                a: SymmetricField::identity(),
                b: [Expr::constant(MINKOWSKI_WIND), Expr::constant(0.0)],
            },
            closed_form: None,
        },
        "randers_nonberwald" => FinslerSurface {
            name: name.into(),
            chart: ChartDomain::Rect {
                x1: [-1.0, 1.0],
                x2: [-1.0, 1.0],
            },
            family: Family::Randers {
                a: SymmetricField::identity(),
                b: [
                    Expr::Mul(Box::new(Expr::constant(NON_BERWALD_EPSILON)), Box::new(Expr::var(1))),
                    Expr::constant(0.0),
                ],
            },
            closed_form: None,
        },
        _ => return None,
    };
    Some(surface)
}

/// Whether the fixture's `F` is quadratic in `y`.
pub fn is_riemannian(surface: &FinslerSurface) -> bool {
    matches!(surface.family, Family::Riemannian { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_fixture_name_resolves() {
        for name in FIXTURE_NAMES {
            let s = fixture(name).unwrap();
            assert_eq!(s.name, name);
            assert!(s.check_definition().is_ok());
        }
        assert!(fixture("funk").is_none());
    }

    #[test]
    fn randers_value_and_wind() {
        let s = fixture("randers_minkowski").unwrap();
        assert!((s.f([0.0, 0.0], [1.0, 0.0]) - 1.3).abs() < 1e-15);
        assert!((s.f([0.0, 0.0], [-1.0, 0.0]) - 0.7).abs() < 1e-15);
        assert!((s.randers_b_norm([0.0, 0.0]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn sigma_samples_lie_on_the_indicatrix_inside_the_chart() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in FIXTURE_NAMES {
            let s = fixture(name).unwrap();
            for _ in 0..50 {
                let p = s.sample_sigma(&mut rng).unwrap();
                assert!(s.chart.contains(p.x));
                assert!((s.f(p.x, p.y) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn disk_grid_stays_inside() {
        let d = ChartDomain::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        };
        let g = d.grid(10, 10);
        assert!(!g.is_empty() && g.len() < 100);
        assert!(g.iter().all(|&x| d.contains(x)));
    }

    #[test]
    fn definition_checks_reject_misplaced_variables() {
        let s = FinslerSurface::new(
            "bad",
            ChartDomain::Rect {
                x1: [-1.0, 1.0],
                x2: [-1.0, 1.0],
            },
            Family::Minkowski {
                norm: Expr::parse("sqrt(y1^2 + y2^2) + x1").unwrap(),
            },
        );
        assert!(s.check_definition().is_err());
    }
}
