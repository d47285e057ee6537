//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// A configuration value violates its documented constraints.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Input data violates a precondition (wrong length, rank deficiency, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A linear-algebra step failed beyond the jitter escalation policy.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The problem size exceeds what the dense solvers support.
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
