use thiserror::Error;

/// Failures that end a command, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Engine(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Engine(_) => 3,
        }
    }

    pub(crate) fn input(context: impl std::fmt::Display, e: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{context}: {e}"))
    }
}

impl From<fdaa_engine::EngineError> for CliError {
    fn from(e: fdaa_engine::EngineError) -> Self {
        match e {
            fdaa_engine::EngineError::Config(m) => CliError::Usage(format!("engine configuration: {m}")),
            other => CliError::Engine(other.to_string()),
        }
    }
}
