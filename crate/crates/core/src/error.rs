use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter failed validation. `field` names the offending field.
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParam { field: String, message: String },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("conflicting similarity scores for pair ({word1}, {word2}) in interval {interval}: {first} vs {second}")]
    ConflictingSymmetry {
        word1: String,
        word2: String,
        interval: usize,
        first: f64,
        second: f64,
    },

    #[error("clustering does not match graph: {0}")]
    GraphMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn param(field: &str, msg: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.to_string(),
            message: msg.into(),
        }
    }

    pub(crate) fn not_found(msg: impl Into<String>) -> Self {
        Error::NotFound(msg.into())
    }
}
