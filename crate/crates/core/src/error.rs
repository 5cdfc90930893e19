use thiserror::Error;

/// Failures raised while building geometric quantities on a potential grid.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("unsupported grid dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("grid needs at least 8 nodes per axis, got {0}")]
    GridTooSmall(usize),
    #[error("expected {expected} grid values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite potential value {value} at node {node:?}")]
    NonFinite { node: Vec<usize>, value: f64 },
    #[error("induced metric is not positive definite at node {node:?} (min eigenvalue {min_eigenvalue})")]
    SingularGraph {
        node: Vec<usize>,
        min_eigenvalue: f64,
    },
    #[error("ambient metric fails chart admissibility at node {node:?}: |h - I| = {deviation} >= {bound}")]
    InadmissibleAmbient {
        node: Vec<usize>,
        deviation: f64,
        bound: f64,
    },
    #[error("{0} requires a flat ambient model")]
    RequiresFlatAmbient(&'static str),
}

/// Failures of the scalar flow.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(
        "slope condition violated at node {node:?}: |D2 phi| = {hessian_norm}, margin {margin}"
    )]
    SlopeViolation {
        node: Vec<usize>,
        hessian_norm: f64,
        margin: f64,
    },
    #[error("blow-up detected at t = {time}: sup|A| = {sup_a}")]
    BlowUp { time: f64, sup_a: f64 },
    #[error("end time {t_end} is not after the current time {time}")]
    InvalidEndTime { time: f64, t_end: f64 },
    #[error("invalid stepper configuration: {0}")]
    InvalidConfig(String),
}

/// Failures of the curve flow.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CurveError {
    #[error("closed curve needs at least 16 points, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate curve: points {0} and {1} coincide")]
    Degenerate(usize, usize),
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("end time {t_end} is not after the current time {time}")]
    InvalidEndTime { time: f64, t_end: f64 },
    #[error("invalid curve flow configuration: {0}")]
    InvalidConfig(String),
}

/// Failures of the diagnostics routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum DiagnosticsError {
    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("record times are not strictly increasing at index {0}")]
    NonMonotoneTime(usize),
    #[error("monitor order k = {0} is outside the supported range 2..=3")]
    UnsupportedOrder(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
