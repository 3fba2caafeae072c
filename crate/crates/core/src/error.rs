use thiserror::Error;

/// Errors raised by the geometry routines.
///
/// Domain violations carry the offending coordinate so callers can point at
/// the bad input; `+∞` distances are values, not errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {index} = {value} lies outside the interior of the domain")]
    Domain { index: usize, value: f64 },

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
