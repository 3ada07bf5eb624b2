use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("no sign change on [{lo}, {hi}] after bracket expansion")]
    NoBracket { lo: f64, hi: f64 },

    #[error("iteration cap of {0} reached without convergence")]
    MaxIterations(usize),

    #[error("matrix is singular or not negative definite: {0}")]
    Singular(String),

    #[error("too few observed events: need at least {needed}, got {got}")]
    TooFewEvents { needed: usize, got: usize },

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{failed} of {total} replications failed at n = {n} (limit 10%)")]
    TooManyFailures { n: usize, failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
