//! Points, vectors and forms on the slit tangent bundle, together with the
//! exterior derivative and Lie bracket computed on jets.

use std::collections::BTreeMap;

use serde::Serialize;

use super::jet::{dot, Jet, MAX_DEGREE, NVARS};
use super::scalar::{Scalar, ScalarField};
use crate::error::{GeometryError, Result};

/// A point `(x, y)` of `TM ∖ {0}` in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BundlePoint {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl BundlePoint {
    pub fn new(x: [f64; 2], y: [f64; 2]) -> Result<Self> {
        if !(x.iter().chain(&y).all(|v| v.is_finite())) {
            return Err(GeometryError::NonFinite {
                context: "bundle point",
            });
        }
        if y == [0.0, 0.0] {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(BundlePoint { x, y })
    }

    pub fn coords(&self) -> [f64; NVARS] {
        [self.x[0], self.x[1], self.y[0], self.y[1]]
    }

    pub fn from_coords(z: [f64; NVARS]) -> Result<Self> {
        BundlePoint::new([z[0], z[1]], [z[2], z[3]])
    }

    /// Same base point, fiber direction scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        BundlePoint {
            x: self.x,
            y: [self.y[0] * lambda, self.y[1] * lambda],
        }
    }
}

/// Components in the coordinate frame `(∂x¹, ∂x², ∂y¹, ∂y²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoordinateVector(pub [f64; NVARS]);

/// Components in the coordinate coframe `(dx¹, dx², dy¹, dy²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoordinateOneForm(pub [f64; NVARS]);

impl CoordinateOneForm {
    pub fn pair(&self, v: &CoordinateVector) -> f64 {
        self.0.iter().zip(&v.0).map(|(a, b)| a * b).sum()
    }
}

impl CoordinateVector {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Vector field with jet-valued components around a base point.
pub type VectorJet = [Jet; NVARS];
/// One-form with jet-valued components around a base point.
pub type FormJet = [Jet; NVARS];

/// Antisymmetric table `(dω)_{ab}`.
#[derive(Clone, Debug)]
pub struct TwoFormJet(pub [[Jet; NVARS]; NVARS]);

impl TwoFormJet {
    /// `dω(X, Y) = (dω)_{ab} X^a Y^b`.
    pub fn apply(&self, x: &VectorJet, y: &VectorJet) -> Jet {
        let mut acc = Jet::constant(0.0);
        for a in 0..NVARS {
            for b in 0..NVARS {
                if a != b {
                    acc += &self.0[a][b] * &(&x[a] * &y[b]);
                }
            }
        }
        acc
    }

    pub fn values(&self) -> [[f64; NVARS]; NVARS] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.0[a][b].value()))
    }
}

pub fn values(v: &[Jet; NVARS]) -> [f64; NVARS] {
    std::array::from_fn(|a| v[a].value())
}

/// `⟨ω, X⟩` on jets.
pub fn pair(form: &FormJet, vector: &VectorJet) -> Jet {
    dot(form, vector)
}

/// `X(f) = X^a ∂_a f`.
pub fn derive_along(vector: &VectorJet, f: &Jet) -> Jet {
    let mut acc = Jet::constant(0.0);
    for (a, xa) in vector.iter().enumerate() {
        acc += xa * &f.partial(a);
    }
    acc
}

/// `(dω)_{ab} = ∂_a ω_b − ∂_b ω_a`.
pub fn exterior_derivative(form: &FormJet) -> TwoFormJet {
    let partials: [[Jet; NVARS]; NVARS] = std::array::from_fn(|a| std::array::from_fn(|b| form[b].partial(a)));
    TwoFormJet(std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            if a == b {
                Jet::constant(0.0)
            } else {
                &partials[a][b] - &partials[b][a]
            }
        })
    }))
}

/// `[X, Y]^a = X^b ∂_b Y^a − Y^b ∂_b X^a`.
pub fn lie_bracket(x: &VectorJet, y: &VectorJet) -> VectorJet {
    std::array::from_fn(|a| &derive_along(x, &y[a]) - &derive_along(y, &x[a]))
}

/// Fields given by four component functions of the bundle coordinates,
/// used both for vector fields and for one-forms.
pub trait ComponentField: Sync {
    fn components<T: Scalar>(&self, z: &[T; NVARS]) -> [T; NVARS];
}

fn component_jets<C: ComponentField>(field: &C, p: &BundlePoint, degree: usize) -> Result<[Jet; NVARS]> {
    let z = Jet::seed(p.coords(), degree);
    let c = field.components(&z);
    if c.iter().all(Jet::is_finite) {
        Ok(c)
    } else {
        Err(GeometryError::NonFinite {
            context: "component field",
        })
    }
}

/// Exterior derivative of a one-form field at `p`.
pub fn exterior_derivative_at<C: ComponentField>(form: &C, p: &BundlePoint) -> Result<[[f64; NVARS]; NVARS]> {
    Ok(exterior_derivative(&component_jets(form, p, 1)?).values())
}

/// Lie bracket of two vector fields at `p`.
pub fn lie_bracket_at<X: ComponentField, Y: ComponentField>(x: &X, y: &Y, p: &BundlePoint) -> Result<CoordinateVector> {
    let xj = component_jets(x, p, 1)?;
    let yj = component_jets(y, p, 1)?;
    Ok(CoordinateVector(values(&lie_bracket(&xj, &yj))))
}

/// Value and mixed partials of a scalar field at a bundle point.
///
/// Partials are keyed by their exponent multi-index over `(x¹, x², y¹, y²)`,
/// so index permutations address the same entry.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeJet {
    pub value: f64,
    pub order_x: usize,
    pub order_y: usize,
    pub partials: BTreeMap<[u8; NVARS], f64>,
}

impl DerivativeJet {
    /// Partial derivative along the listed coordinate indices
    /// (`0, 1` for `x¹, x²`; `2, 3` for `y¹, y²`), in any order.
    pub fn partial(&self, indices: &[usize]) -> Option<f64> {
        let mut alpha = [0u8; NVARS];
        for &i in indices {
            *alpha.get_mut(i)? += 1;
        }
        self.partials.get(&alpha).copied()
    }

    fn admits(alpha: &[u8; NVARS], order_x: usize, order_y: usize) -> bool {
        (alpha[0] + alpha[1]) as usize <= order_x && (alpha[2] + alpha[3]) as usize <= order_y
    }
}

pub const MAX_ORDER_X: usize = 3;
pub const MAX_ORDER_Y: usize = 4;

fn check_orders(order_x: usize, order_y: usize) -> Result<()> {
    if order_x > MAX_ORDER_X || order_y > MAX_ORDER_Y || order_x + order_y > MAX_DEGREE {
        return Err(GeometryError::UnsupportedOrder { order_x, order_y });
    }
    Ok(())
}

/// Exact value and partials of `f` at `p` up to `(order_x, order_y)`.
pub fn eval_jet<F: ScalarField>(f: &F, p: &BundlePoint, order_x: usize, order_y: usize) -> Result<DerivativeJet> {
    check_orders(order_x, order_y)?;
    if !f.contains(p.x) {
        return Err(GeometryError::OutsideChart { x: p.x });
    }
    let z = Jet::seed(p.coords(), order_x + order_y);
    let [x1, x2, y1, y2] = z;
    let jet = f.eval([x1, x2], [y1, y2]);
    if !jet.is_finite() {
        return Err(GeometryError::NonFinite {
            context: "scalar field",
        });
    }
    let partials = jet
        .derivatives()
        .filter(|(alpha, _)| DerivativeJet::admits(alpha, order_x, order_y))
        .collect();
    Ok(DerivativeJet {
        value: jet.value(),
        order_x,
        order_y,
        partials,
    })
}

/// Central-difference weights `(offset, weight)` for the `k`-th derivative
/// with unit step; each has an error expansion in even powers of the step.
fn central_stencil(k: u8) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("orders above 4 per variable are rejected earlier"),
    }
}

/// Step for a mixed partial of total order `k`. First derivatives use
/// `1e-5 · scale`; higher orders balance the O(h⁴) Richardson remainder
/// against the `ε/h^k` round-off.
fn fd_step(k: usize, scale: f64) -> f64 {
    if k <= 1 {
        1e-5 * scale
    } else {
        scale * 10f64.powf(-16.0 / (k as f64 + 4.0))
    }
}

fn tensor_difference(f: &dyn Fn([f64; NVARS]) -> f64, z: [f64; NVARS], alpha: [u8; NVARS], h: f64) -> f64 {
    let stencils: [&[(i32, f64)]; NVARS] = std::array::from_fn(|v| central_stencil(alpha[v]));
    let order: i32 = alpha.iter().map(|&a| a as i32).sum();
    let mut acc = 0.0;
    for &(o0, w0) in stencils[0] {
        for &(o1, w1) in stencils[1] {
            for &(o2, w2) in stencils[2] {
                for &(o3, w3) in stencils[3] {
                    let q = [
                        z[0] + o0 as f64 * h,
                        z[1] + o1 as f64 * h,
                        z[2] + o2 as f64 * h,
                        z[3] + o3 as f64 * h,
                    ];
                    acc += w0 * w1 * w2 * w3 * f(q);
                }
            }
        }
    }
    acc / h.powi(order)
}

/// Divided-difference fallback for black-box fields that can only be
/// evaluated on `f64`. Central stencils with one Richardson extrapolation;
/// first and second partials are good to about `1e-6` relative, third and
/// fourth to about `1e-3`.
pub fn eval_jet_fd(
    f: &dyn Fn([f64; NVARS]) -> f64,
    p: &BundlePoint,
    order_x: usize,
    order_y: usize,
    scale: f64,
) -> Result<DerivativeJet> {
    check_orders(order_x, order_y)?;
    let z = p.coords();
    let value = f(z);
    if !value.is_finite() {
        return Err(GeometryError::NonFinite {
            context: "black-box field",
        });
    }
    let mut partials = BTreeMap::new();
    for ax0 in 0..=order_x as u8 {
        for ax1 in 0..=(order_x as u8 - ax0) {
            for ay0 in 0..=order_y as u8 {
                for ay1 in 0..=(order_y as u8 - ay0) {
                    let alpha = [ax0, ax1, ay0, ay1];
                    let k = alpha.iter().map(|&a| a as usize).sum::<usize>();
                    let d = if k == 0 {
                        value
                    } else {
                        let h = fd_step(k, scale);
                        let fine = tensor_difference(f, z, alpha, h);
                        let coarse = tensor_difference(f, z, alpha, 2.0 * h);
                        (4.0 * fine - coarse) / 3.0
                    };
                    if !d.is_finite() {
                        return Err(GeometryError::NonFinite {
                            context: "black-box field",
                        });
                    }
                    partials.insert(alpha, d);
                }
            }
        }
    }
    Ok(DerivativeJet {
        value,
        order_x,
        order_y,
        partials,
    })
}
