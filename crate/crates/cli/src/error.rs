use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Domain(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<hotelling_core::Error> for CliError {
    fn from(e: hotelling_core::Error) -> Self {
        use hotelling_core::Error as E;
        match e {
            E::InvalidParams(m) => CliError::Usage(m),
            E::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}
