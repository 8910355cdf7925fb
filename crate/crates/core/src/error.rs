use thiserror::Error;

/// Errors produced by the simulator model layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its physical domain (negative variance,
    /// efficiency outside [0, 1], uncertainty-violating squeezer, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation was applied to values it is not defined for
    /// (mismatched bases, classical mode where an optical one is required).
    #[error("usage error: {0}")]
    Usage(String),

    /// The closed-form oracle was called for a configuration outside its
    /// stated scope.
    #[error("outside oracle scope: {0}")]
    OracleScope(String),

    /// Inputs are inconsistent with the linear model (e.g. an output
    /// variance below the gain-scaled input variance).
    #[error("model violation: {0}")]
    ModelViolation(String),

    /// A transfer coefficient was requested for a signal-free quadrature.
    #[error("undefined transfer: {0}")]
    UndefinedTransfer(String),
}

pub type Result<T> = std::result::Result<T, Error>;
