use dicke_core::DickeError;
use thiserror::Error;

/// Failure categories, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<DickeError> for CliError {
    fn from(e: DickeError) -> Self {
        match e {
            DickeError::InvalidParams(_) | DickeError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            DickeError::StepFailure { .. } => CliError::Numerical(e.to_string()),
            _ if e.is_domain() => CliError::Domain(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}
