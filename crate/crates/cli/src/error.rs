use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Math(#[from] framemult::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 internal error, 2 mathematical failure, 3 input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Math(e) if e.is_mathematical() => 2,
            CliError::Math(_) | CliError::Input(_) => 3,
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
        CliError::Input(e.to_string())
    }
}
