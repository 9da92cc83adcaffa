use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] phasetime_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for invalid input, 3 for numerical failure, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) | CliError::Usage(_) | CliError::Manifest(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}
