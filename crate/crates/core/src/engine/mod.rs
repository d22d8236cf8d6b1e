//! Scalar-field evaluation on the slit tangent bundle: truncated Taylor
//! jets, a divided-difference fallback, and exterior-calculus primitives.

pub mod calculus;
pub mod jet;
pub mod scalar;

pub use calculus::{
    derive_along, eval_jet, eval_jet_fd, exterior_derivative, exterior_derivative_at, lie_bracket, lie_bracket_at,
    pair, values, BundlePoint, ComponentField, CoordinateOneForm, CoordinateVector, DerivativeJet, FormJet, TwoFormJet,
    VectorJet,
};
pub use jet::{Jet, MAX_DEGREE, NVARS};
pub use scalar::{Scalar, ScalarField};
