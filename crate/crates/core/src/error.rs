//! Error types shared across the toolkit.

use thiserror::Error;

/// Errors from function evaluation, configuration, and solver preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: lo = {lo} must be strictly below hi = {hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("x = {x} is outside the domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("evaluation failed at x = {x}: {reason}")]
    Eval { x: f64, reason: String },

    #[error("evaluation produced non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("function does not carry a derivative of order {order}")]
    MissingDerivative { order: u8 },

    #[error("derivative vanished at x = {x}")]
    ZeroDerivative { x: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoBracket { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Failure of an iterative solve, carrying the iterates accepted before the
/// failure so callers can inspect the partial trace.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{error}")]
pub struct SolveError {
    pub error: Error,
    /// Iterates produced before the failure. Empty when the starting point
    /// itself was rejected.
    pub iterates: Vec<f64>,
}

impl SolveError {
    pub(crate) fn new(error: Error, iterates: Vec<f64>) -> Self {
        Self { error, iterates }
    }
}
