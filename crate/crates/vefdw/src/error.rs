//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An exponent function left the admissible range `(1, 2)` on `[0, T]`.
    #[error("exponent out of range: alpha({t}) = {value} is not in (1, 2)")]
    ExponentOutOfRange { t: f64, value: f64 },

    #[error("invalid exponent parameter: {0}")]
    InvalidExponent(String),

    #[error("invalid quadrature parameters: {0}")]
    InvalidQuadrature(String),

    /// The tridiagonal QL iteration failed to converge for some eigenvalue.
    #[error("symmetric tridiagonal eigensolver failed to converge (n = {n})")]
    EigenFailure { n: usize },

    /// Adaptive node doubling for `g(t)` hit the cap without converging.
    #[error("g(t) quadrature did not converge at t = {t} with {max_nodes} nodes")]
    GNonConvergence { t: f64, max_nodes: usize },

    #[error("matrix is not symmetric positive definite (pivot {pivot} at row {row})")]
    NotSpd { row: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A scheme's left-hand matrix lost positivity, e.g. `1 + w_0 <= 0`.
    #[error("scheme left-hand side is not positive definite: {0}")]
    IndefiniteSystem(String),

    #[error("time step {step} failed: {source}")]
    StepFailure {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("study level {level} failed: {source}")]
    StudyLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("Ritz projection requested but no gradient is available for {0}")]
    MissingGradient(&'static str),

    #[error("invalid study: {0}")]
    InvalidStudy(String),
}

pub type Result<T> = std::result::Result<T, Error>;
