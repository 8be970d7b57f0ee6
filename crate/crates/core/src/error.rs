use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested operation is not available for this configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite {what} at point {point:?}")]
    Evaluation { what: String, point: Vec<f64> },

    #[error("sampling failure: {0}")]
    Sampling(String),

    #[error("resource limit: {0}")]
    Limit(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
