use thiserror::Error;

/// Command failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("integration terminated abnormally: {0}")]
    Integration(String),
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Regime(_) | CliError::Verification(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}
