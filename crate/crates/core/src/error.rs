use thiserror::Error;

/// Errors produced by the channel model, the information-theoretic routines,
/// the allocation policy and the estimator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates one of its invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("level index {index} out of range for {levels} levels")]
    LevelOutOfRange { index: usize, levels: usize },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("numerical failure: {what} (achieved error estimate {achieved:e})")]
    Numerical { what: String, achieved: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("histograms were taken with different read thresholds")]
    MismatchedThresholds,

    /// A configuration key is unknown or its value does not parse.
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    /// A text file (histogram, config) failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
