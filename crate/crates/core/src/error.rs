use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}, column {column}: {message}")]
    MalformedRow { path: PathBuf, row: usize, column: usize, message: String },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid hyperparameter for {algorithm}: {message}")]
    Hyperparameter { algorithm: String, message: String },

    #[error("expected {expected} feature columns, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("training set contains a single class; {0} cannot be fitted")]
    SingleClass(String),

    #[error("fold {fold} is degenerate: {message}")]
    DegenerateFold { fold: usize, message: String },

    #[error("model error: {0}")]
    Model(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn hyper(algorithm: impl ToString, message: impl Into<String>) -> Self {
        Error::Hyperparameter { algorithm: algorithm.to_string(), message: message.into() }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
