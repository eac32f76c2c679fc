use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("scenario {name}: {source}")]
    Simulation {
        name: String,
        #[source]
        source: trichoderma_core::Error,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("acceptance check failed: {0}")]
    CheckFailed(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 invalid input or failed check, 3 I/O, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) | HarnessError::Parse { .. } | HarnessError::CheckFailed(_) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::Simulation { .. } => 4,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
