use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed line in one of the line-oriented input files.
    #[error("{path}:{line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("document {doc}: {what} has length {found}, expected {expected}")]
    LengthMismatch {
        doc: usize,
        what: &'static str,
        found: usize,
        expected: usize,
    },

    #[error("document {doc}: span ({start}, {end}) outside {len} tokens")]
    SpanOutOfRange {
        doc: usize,
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("no valid span")]
    NoValidSpan,

    #[error("scorer file {path}: missing outputs for {missing:?}")]
    MissingScorerOutputs {
        path: PathBuf,
        missing: Vec<(String, String)>,
    },

    #[error("scorer record ({question_id}, {doc_id}): {message}")]
    InvalidScorerRecord {
        question_id: String,
        doc_id: String,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn record(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Record {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
