use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything the runner and the CLI can fail with.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad config file, preset, flag value or environment override.
    #[error("config error: {0}")]
    Config(String),
    /// Filesystem failure, with the path involved.
    #[error("{}: {source}", path.display())]
    Io {
        /// File or directory being accessed.
        path: PathBuf,
        /// Underlying error.
        source: io::Error,
    },
    /// Malformed or unwritable CSV.
    #[error("{}: {source}", path.display())]
    Csv {
        /// CSV file.
        path: PathBuf,
        /// Underlying error.
        source: csv::Error,
    },
    /// Numerical failure or rejected parameter from the core crate.
    #[error(transparent)]
    Core(#[from] wglab_core::Error),
    /// The worker pool could not be started.
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for anything the user has to fix in the
    /// input, 1 for failures at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Core(wglab_core::Error::InvalidParameter(_))
            | Error::Core(wglab_core::Error::Domain { .. }) => 2,
            _ => 1,
        }
    }
}
