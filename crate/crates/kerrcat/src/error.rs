//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: truncation must be at least 2")]
    InvalidDimension(usize),

    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("zero-vector state: {0}")]
    ZeroVector(String),

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("integrator failure: {0}")]
    IntegratorFailure(String),

    #[error("fit failure: {reason} (residual norm {residual:.3e})")]
    FitFailure { reason: String, residual: f64 },

    #[error("ill-defined codespace: {0}")]
    IllDefinedCodespace(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ambiguous matrix logarithm: {0}")]
    AmbiguousLog(String),

    #[error("model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;
