use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("not a valid state: {0}")]
    InvalidState(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("{what} = {value} is outside the domain {domain}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("degenerate decomposition: {0}")]
    Degenerate(String),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("fixture parse error at line {line}: {msg}")]
    Fixture { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(what: &'static str, value: f64, domain: impl Into<String>) -> Error {
    Error::OutOfRange {
        what,
        value,
        domain: domain.into(),
    }
}
