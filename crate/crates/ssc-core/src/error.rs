use thiserror::Error;

/// Errors produced by the pattern algebra, graph tests and file loaders.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand dimensions do not fit the operation; the message names both shapes.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An argument is out of range or otherwise unusable.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A node system or network violates the assumptions an operation relies on.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Enumerating a pattern class would exceed the realization budget.
    #[error("enumeration budget exceeded: {count} realizations (limit {limit})")]
    Budget { count: u128, limit: u128 },

    /// A numeric routine (eigenvalue iteration, SVD) failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Malformed pattern, node or network input.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
