use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] fracvar::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: everything that is not a failed check is a
    /// configuration problem.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

pub type CliResult<T> = Result<T, CliError>;
