use thiserror::Error as ThisError;

use crate::ordinal::OrdinalError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, ThisError, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("type mismatch: {0}")]
    Type(String),
    #[error("space is not enumerable: {0}")]
    NotEnumerable(String),
    #[error("set is not closed in the topology: {0}")]
    NotClosed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("fuel exhausted after {0} steps")]
    Fuel(u64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

impl Error {
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Ordinal(OrdinalError::Parse { .. }))
    }
}
