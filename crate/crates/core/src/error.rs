use thiserror::Error;

/// Errors produced by coreset construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoresetError {
    /// Malformed or out-of-range input (dimension mismatch, `m` too large, bad range).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A structural assumption of a builder does not hold, e.g. `n >= 4m`.
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    /// Generator parameters that do not define an instance.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, CoresetError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CoresetError::InvalidInput(msg.into()))
}
