use thiserror::Error;

/// Failure of a CLI command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[source] cpf_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<cpf_core::Error> for CliError {
    fn from(e: cpf_core::Error) -> Self {
        use cpf_core::Error::*;
        match e {
            InvalidParameter { .. } | Domain { .. } | GridTooNarrow { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e),
        }
    }
}
