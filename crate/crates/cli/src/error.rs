use std::process::ExitCode;

use thiserror::Error;

/// A failure with the process exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
        })
    }
}

impl From<eqop::Error> for CliError {
    fn from(e: eqop::Error) -> Self {
        use eqop::Error as E;
        match e {
            E::Io { .. } | E::Parse { .. } | E::Inconsistent(_) => CliError::Io(e.to_string()),
            E::Validation(_) | E::Dimension(_) | E::Unsupported(_) | E::Json(_) => {
                CliError::Usage(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
