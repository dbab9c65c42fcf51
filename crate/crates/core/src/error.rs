use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("duplicate document id {0:?}")]
    DuplicateId(String),

    #[error("document {0:?} has an empty title")]
    EmptyTitle(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown neighbor code {code:?}; valid codes: {valid}")]
    UnknownCode { code: String, valid: String },

    #[error("zero vector for ({doc_id}, {code})")]
    ZeroVector { doc_id: String, code: String },

    #[error("missing record ({doc_id}, {code})")]
    MissingRecord { doc_id: String, code: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("transport error talking to {endpoint} (batch {batch}): {message}")]
    Transport { endpoint: String, batch: String, message: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Input-validation failures, as opposed to runtime faults (I/O,
    /// transport, protocol).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::DuplicateId(_)
                | Error::EmptyTitle(_)
                | Error::Validation(_)
                | Error::UnknownCode { .. }
                | Error::Format(_)
                | Error::Dimension { .. }
                | Error::MissingRecord { .. }
        )
    }
}
