//! Numerical core for the fourth-order volume-gradient flow of Lagrangian
//! graphs over a periodic Darboux chart and for the curve diffusion flow.

// NaN-rejecting negated comparisons and explicit tensor index arithmetic are deliberate.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::identity_op,
    clippy::erasing_op,
    clippy::needless_range_loop
)]

pub mod curve;
pub mod diagnostics;
pub mod diff;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod scalar_flow;

pub use diff::Scheme;
pub use error::{CurveError, DiagnosticsError, FlowError, GeometryError};
pub use grid::PotentialGrid;
