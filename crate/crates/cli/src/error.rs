use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("size cap exceeded: {0}")]
    Cap(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Parse(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Cap(_) => 4,
            CliError::Verification(_) => 5,
        })
    }
}

impl From<lindsim::Error> for CliError {
    fn from(e: lindsim::Error) -> Self {
        match e {
            lindsim::Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(format!("I/O: {e}"))
    }
}
