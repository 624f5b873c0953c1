//! CLI-level errors with exit-code classification.
//!
//! Exit codes: 0 success, 1 validation error (bad arguments, malformed or
//! inconsistent input files), 2 numerical failure (rank deficiency and the
//! like, surfaced from the estimation machinery).

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] intravol::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.kind() == intravol::ErrorKind::Numerical => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
