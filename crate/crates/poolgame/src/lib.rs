//! File formats, sweep configuration and parallel drivers on top of
//! [`poolgame_core`], plus the library half of the `poolgame` binary.
//!
//! Everything user-facing here (CLI flags, JSON keys, CSV columns) numbers
//! options from 1, as in the usual statement of the game. The core API is
//! 0-based.

pub mod cli;
pub mod config;
pub mod format;
pub mod grid;
pub mod parallel;
pub mod sweep;

pub use poolgame_core as core;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] poolgame_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("invalid input document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Stream(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// Process exit status: 2 usage or domain, 3 capacity, 4 non-convergence, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use poolgame_core::Error as E;
        match self {
            Error::Usage(_) | Error::Json(_) | Error::Core(E::Domain(_)) => 2,
            Error::Core(E::Capacity { .. }) => 3,
            Error::Core(E::NonConvergence(_)) => 4,
            _ => 1,
        }
    }
}
