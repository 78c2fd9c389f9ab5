use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across ingestion, dictionary handling, auditing and sessions.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input; `line` is 1-based and 0 when the input is not line oriented.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    /// Incompatible settings, e.g. a pronoun dictionary paired with a stemming profile.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown {kind} `{name}`")]
    NotFound { kind: &'static str, name: String },

    /// Operation not permitted in the current state (e.g. resolving a pending term).
    #[error("conflict: {0}")]
    Conflict(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// The offending field for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}
