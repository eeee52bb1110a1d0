use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: truncated record at byte offset {offset} (record size {record_size})")]
    TruncatedRecord { path: PathBuf, offset: u64, record_size: usize },

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch { what: &'static str, left: usize, right: usize },

    #[error("{path}: malformed config: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("invalid projection model: {0}")]
    InvalidModel(String),

    #[error("grid of {width}x{height} is too small for a 3x3 kernel")]
    UndersizedGrid { width: usize, height: usize },

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
