use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("cannot parse {context}: {message}")]
    Parse { context: String, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    /// A segment map would assign `t_seg` to an earlier report segment than
    /// its predecessor (or a later one than its successor).
    #[error(
        "monotonicity violated: t_seg {t_seg} -> r_seg {r_seg} conflicts with \
         t_seg {neighbor_t_seg} -> r_seg {neighbor_r_seg}"
    )]
    Monotonicity {
        t_seg: usize,
        r_seg: usize,
        neighbor_t_seg: usize,
        neighbor_r_seg: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("revision conflict: expected {expected}, current is {current}")]
    Conflict { expected: u64, current: u64 },

    #[error("session for meeting {0} is already submitted")]
    SessionClosed(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }
}
