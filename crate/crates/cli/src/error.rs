use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid flags or configuration file; nothing was computed.
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] plap_core::Error),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 1 for configuration problems, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}
