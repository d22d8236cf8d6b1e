use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point x = {x:?} lies outside the chart domain")]
    OutsideChart { x: [f64; 2] },

    #[error("fiber direction y must be non-zero")]
    ZeroDirection,

    #[error("non-finite value while evaluating {context}")]
    NonFinite { context: &'static str },

    #[error("jet order (x: {order_x}, y: {order_y}) is not supported (max x: 3, y: 4)")]
    UnsupportedOrder { order_x: usize, order_y: usize },

    #[error("not strongly convex at x = {x:?}, y = {y:?}: smallest eigenvalue of g is {min_eigenvalue:e}")]
    NotStronglyConvex {
        x: [f64; 2],
        y: [f64; 2],
        min_eigenvalue: f64,
    },

    #[error(
        "no sign change of g_N(N, T) over the indicatrix at x = {x:?} for T = {t:?}; the norm is not strictly convex"
    )]
    NoNormal { x: [f64; 2], t: [f64; 2] },

    #[error("fiber vector is not on the indicatrix: |F(x, N) - 1| = {residual:e}")]
    OffIndicatrix { residual: f64 },

    #[error("diagnostics need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("samples must be uniformly spaced in t")]
    NonUniformSpacing,

    #[error("EL degenerate: I3 ≈ -1 (1 + I3 = {one_plus_i3:e})")]
    ElDegenerate { one_plus_i3: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
