use persuade_core::Error as CoreError;
use thiserror::Error;

/// Failures surfaced by the command-line harness, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Input(m) => CliError::Input(m),
            CoreError::Capacity(m) => CliError::Capacity(m),
            CoreError::NoImprovement(m) => CliError::Input(format!("no improvement possible: {m}")),
            CoreError::UnsupportedExact(m) => CliError::Input(format!("no exact moments: {m}")),
            CoreError::NoStableFound => CliError::Verification("no stable solution found".into()),
            other @ (CoreError::Lp(_) | CoreError::Internal(_)) => CliError::Verification(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("malformed JSON: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
