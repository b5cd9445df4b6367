use std::io;

use thiserror::Error;

/// Errors surfaced by the command-line driver, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error("verification failed: {0}")]
    Verify(String),

    #[error("budget refused: {0}")]
    Budget(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io(_) => 3,
            CliError::Verify(_) => 4,
            CliError::Budget(_) => 5,
        }
    }
}

impl From<lnratio::Error> for CliError {
    fn from(e: lnratio::Error) -> Self {
        match e {
            lnratio::Error::Budget { .. } => CliError::Budget(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}
