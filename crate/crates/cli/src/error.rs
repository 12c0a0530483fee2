use std::path::Path;
use std::process::ExitCode;

use laddertangle_core::error::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: config, flags or unreadable files.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Physics(String),
    /// The invariant suite ran and reported failures.
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Validation(_) => 1,
            CliError::Input(_) => 2,
            CliError::Physics(_) => 3,
        })
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_config_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Physics(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
