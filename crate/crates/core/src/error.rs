//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Evaluation at a pole or outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested accuracy cannot be certified.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// A mode of an operator is not positive.
    #[error("singular operator: {0}")]
    SingularOperator(String),
    /// Linearly dependent or otherwise degenerate input.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// An iterative method failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The requested law does not apply to the given model.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
}

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
