//! Numerical Cartan invariants, structure-equation checks and normal-lift
//! curve flows on Finsler surfaces.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod engine;
pub mod error;
pub mod expr;
pub mod flows;
pub mod frame;
pub mod geometry;
pub mod surface;
pub mod verify;

pub use error::{GeometryError, Result};
