//! Shared error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller-supplied values violate an operation's contract.
    #[error("input error: {0}")]
    Input(String),

    /// An input file does not match the expected schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A metric is undefined for the given data (e.g. single-class sets).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// An internal invariant broke; indicates a bug rather than bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
