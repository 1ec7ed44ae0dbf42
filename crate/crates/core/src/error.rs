use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: sizes, ranges, sparsity patterns, malformed files.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The request exceeds a hard size guard (dense state spaces).
    #[error("capacity error: n = {n} exceeds the limit of {limit} nodes")]
    Capacity { n: usize, limit: usize },

    /// An iterative or integration routine failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// A sweep combination failed; the inner error is kept.
    #[error("combo {combo}: {source}")]
    Combo {
        combo: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the command line tool: 2 for numerical
    /// failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 2,
            Error::Combo { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
