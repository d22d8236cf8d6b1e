//! Berwald frame and coframe, the lifted frame on the indicatrix bundle,
//! and the invariants `I`, `J`, `K` with their frame derivatives.
//!
//! Frame indices are 1-based throughout the public API, so `derive(2, f)`
//! is the derivative along `ê₂`.

use serde::Serialize;

use crate::engine::{
    derive_along, exterior_derivative, pair, values, BundlePoint, CoordinateOneForm, CoordinateVector, FormJet, Jet,
    ScalarField, TwoFormJet, VectorJet,
};
use crate::error::Result;
use crate::expr::Expr;
use crate::geometry::LocalGeometry;
use crate::surface::FinslerSurface;

/// Frame, coframe and lifted fields on jets around one bundle point.
#[derive(Clone, Debug)]
pub struct FrameJets {
    pub geometry: LocalGeometry,
    pub m_up: [Jet; 2],
    pub l_up: [Jet; 2],
    pub m_down: [Jet; 2],
    pub l_down: [Jet; 2],
    pub ehat: [VectorJet; 3],
    pub omega: [FormJet; 3],
}

/// `I`, `J`, `K` as jets.
#[derive(Clone, Debug)]
pub struct InvariantJets {
    pub i: Jet,
    pub j: Jet,
    pub k: Jet,
}

fn zero() -> Jet {
    Jet::constant(0.0)
}

impl FrameJets {
    pub fn new(surface: &FinslerSurface, p: &BundlePoint, degree: usize) -> Result<Self> {
        let geometry = LocalGeometry::new(surface, p, degree)?;
        let LocalGeometry {
            y,
            f,
            f_y,
            det_g,
            nonlinear,
            ..
        } = &geometry;
        let sqrt_g = det_g.sqrt();
        let inv_sqrt_g = sqrt_g.recip();
        let inv_f = f.recip();

        let m_up = [&f_y[1] * &inv_sqrt_g, -(&f_y[0] * &inv_sqrt_g)];
        let l_up = [&y[0] * &inv_f, &y[1] * &inv_f];
        let scale = &sqrt_g * &inv_f;
        let m_down = [&y[1] * &scale, -(&y[0] * &scale)];
        let l_down = f_y.clone();

        // δ/δx^i = ∂/∂x^i − 𝒩^j_i ∂/∂y^j
        let horizontal = |v: &[Jet; 2]| -> VectorJet {
            let vert: [Jet; 2] = std::array::from_fn(|j| -(&(&nonlinear[j][0] * &v[0]) + &(&nonlinear[j][1] * &v[1])));
            let [v1, v2] = vert;
            [v[0].clone(), v[1].clone(), v1, v2]
        };
        let e1 = horizontal(&m_up);
        let e2 = horizontal(&l_up);
        let e3 = [zero(), zero(), f * &m_up[0], f * &m_up[1]];

        let omega1 = [m_down[0].clone(), m_down[1].clone(), zero(), zero()];
        let omega2 = [l_down[0].clone(), l_down[1].clone(), zero(), zero()];
        let conn: [Jet; 2] =
            std::array::from_fn(|k| &(&(&m_down[0] * &nonlinear[0][k]) + &(&m_down[1] * &nonlinear[1][k])) * &inv_f);
        let [c1, c2] = conn;
        let omega3 = [c1, c2, &m_down[0] * &inv_f, &m_down[1] * &inv_f];

        Ok(FrameJets {
            m_up,
            l_up,
            m_down,
            l_down,
            ehat: [e1, e2, e3],
            omega: [omega1, omega2, omega3],
            geometry,
        })
    }

    /// Cartan scalar `I = A(e₁, e₁, e₁)`.
    pub fn cartan_scalar(&self) -> Jet {
        let mut acc = zero();
        let m = &self.m_up;
        for i in 0..2 {
            for j in 0..2 {
                let mm = &m[i] * &m[j];
                for k in 0..2 {
                    acc += &self.geometry.cartan[i][j][k] * &(&mm * &m[k]);
                }
            }
        }
        acc
    }

    pub fn d_omega(&self, c: usize) -> TwoFormJet {
        exterior_derivative(&self.omega[c - 1])
    }

    /// `K = dω³(ê₁, ê₂)` and `J = −dω³(ê₁, ê₃)` together with `I`.
    pub fn invariant_jets(&self) -> InvariantJets {
        let d3 = self.d_omega(3);
        InvariantJets {
            i: self.cartan_scalar(),
            j: -d3.apply(&self.ehat[0], &self.ehat[2]),
            k: d3.apply(&self.ehat[0], &self.ehat[1]),
        }
    }

    /// `f_a = ê_a(f)`.
    pub fn derive(&self, a: usize, f: &Jet) -> Jet {
        derive_along(&self.ehat[a - 1], f)
    }

    pub fn e(&self, a: usize) -> &VectorJet {
        &self.ehat[a - 1]
    }

    /// `ω^c(X)`.
    pub fn pair(&self, c: usize, x: &VectorJet) -> Jet {
        pair(&self.omega[c - 1], x)
    }

    /// `duality()[c][a] = ω^{c+1}(ê_{a+1})` at the base point.
    pub fn duality(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|c| std::array::from_fn(|a| pair(&self.omega[c], &self.ehat[a]).value()))
    }

    pub fn frame_data(&self) -> FrameData {
        let v2 = |v: &[Jet; 2]| [v[0].value(), v[1].value()];
        FrameData {
            m_up: v2(&self.m_up),
            l_up: v2(&self.l_up),
            m_down: v2(&self.m_down),
            l_down: v2(&self.l_down),
            ehat: std::array::from_fn(|a| CoordinateVector(values(&self.ehat[a]))),
            omega: std::array::from_fn(|c| CoordinateOneForm(values(&self.omega[c]))),
        }
    }
}

/// Frame and coframe values at a point of the slit bundle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameData {
    /// `e₁ = m^i ∂/∂x^i`.
    pub m_up: [f64; 2],
    /// `e₂ = l^i ∂/∂x^i`.
    pub l_up: [f64; 2],
    pub m_down: [f64; 2],
    pub l_down: [f64; 2],
    pub ehat: [CoordinateVector; 3],
    pub omega: [CoordinateOneForm; 3],
}

pub fn berwald_frame(surface: &FinslerSurface, p: &BundlePoint) -> Result<FrameData> {
    Ok(FrameJets::new(surface, p, LocalGeometry::MIN_DEGREE)?.frame_data())
}

/// Invariants and their frame derivatives at a point of `Σ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct InvariantSet {
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub i22: f64,
    pub i23: f64,
}

/// Jet degree needed for every entry of [`InvariantSet`].
pub const INVARIANT_DEGREE: usize = 5;

/// Projects `p` onto `Σ` along its ray.
pub fn to_sigma(surface: &FinslerSurface, p: &BundlePoint) -> Result<BundlePoint> {
    surface.check_point(p)?;
    BundlePoint::new(p.x, surface.to_indicatrix(p.x, p.y)?)
}

impl InvariantSet {
    pub fn from_frame(frame: &FrameJets) -> Self {
        let InvariantJets { i, j, k } = frame.invariant_jets();
        let d = |a, f: &Jet| frame.derive(a, f);
        let i2 = d(2, &i);
        InvariantSet {
            i: i.value(),
            j: j.value(),
            k: k.value(),
            i1: d(1, &i).value(),
            i2: i2.value(),
            i3: d(3, &i).value(),
            j1: d(1, &j).value(),
            j2: d(2, &j).value(),
            j3: d(3, &j).value(),
            k1: d(1, &k).value(),
            k2: d(2, &k).value(),
            k3: d(3, &k).value(),
            i22: d(2, &i2).value(),
            i23: d(3, &i2).value(),
        }
    }
}

/// Invariants at the ray through `p`, evaluated on `Σ`.
pub fn invariants(surface: &FinslerSurface, p: &BundlePoint) -> Result<InvariantSet> {
    let q = to_sigma(surface, p)?;
    Ok(InvariantSet::from_frame(&FrameJets::new(
        surface,
        &q,
        INVARIANT_DEGREE,
    )?))
}

/// A scalar function on the bundle whose frame derivatives are wanted.
#[derive(Clone, Debug)]
pub enum FrameScalar {
    Constant(f64),
    CartanScalar,
    Landsberg,
    Curvature,
    /// A user expression in `x1, x2, y1, y2`.
    Field(Expr),
}

impl FrameScalar {
    pub fn name(&self) -> String {
        match self {
            FrameScalar::Constant(c) => format!("{c}"),
            FrameScalar::CartanScalar => "I".into(),
            FrameScalar::Landsberg => "J".into(),
            FrameScalar::Curvature => "K".into(),
            FrameScalar::Field(e) => e.to_string(),
        }
    }

    /// Evaluation degree leaving room for two frame derivatives.
    pub fn degree_for_second_derivatives(&self) -> usize {
        match self {
            FrameScalar::Landsberg | FrameScalar::Curvature => 6,
            _ => 5,
        }
    }

    pub fn jet(&self, frame: &FrameJets) -> Jet {
        match self {
            FrameScalar::Constant(c) => Jet::constant(*c),
            FrameScalar::CartanScalar => frame.cartan_scalar(),
            FrameScalar::Landsberg => frame.invariant_jets().j,
            FrameScalar::Curvature => frame.invariant_jets().k,
            FrameScalar::Field(e) => {
                let [x1, x2, y1, y2] = Jet::seed(frame.geometry.point.coords(), frame.geometry.degree);
                ScalarField::eval(e, [x1, x2], [y1, y2])
            }
        }
    }
}

/// `f_a = ê_a(f)` for a scalar field on the bundle.
pub fn directional_derivative<F: ScalarField>(
    surface: &FinslerSurface,
    f: &F,
    p: &BundlePoint,
    a: usize,
) -> Result<f64> {
    assert!((1..=3).contains(&a), "frame index must be 1, 2 or 3");
    let frame = FrameJets::new(surface, p, LocalGeometry::MIN_DEGREE)?;
    let [x1, x2, y1, y2] = Jet::seed(p.coords(), LocalGeometry::MIN_DEGREE);
    let fj = ScalarField::eval(f, [x1, x2], [y1, y2]);
    if !fj.is_finite() {
        return Err(crate::GeometryError::NonFinite {
            context: "scalar field",
        });
    }
    Ok(frame.derive(a, &fj).value())
}
