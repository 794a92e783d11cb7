use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("form is singular")]
    Singular,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("form is not positive semidefinite")]
    NotPositiveSemidefinite,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("not supported: {0}")]
    Unsupported(String),
    #[error("unresolved: {0}")]
    Unresolved(String),
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
