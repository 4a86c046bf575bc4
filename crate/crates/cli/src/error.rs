use std::io;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error(transparent)]
    Core(#[from] specfid::Error),

    #[error("could not write CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("could not encode JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
