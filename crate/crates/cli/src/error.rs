use avlab::AvError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Config(_) => 4,
            CliError::Resource(_) => 5,
        }
    }

    pub fn write(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Resource(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<AvError> for CliError {
    fn from(e: AvError) -> Self {
        let msg = e.to_string();
        match e {
            AvError::NonFinite { .. } | AvError::Data(_) => CliError::Data(msg),
            AvError::Resource { .. } => CliError::Resource(msg),
            AvError::InvalidLength { .. }
            | AvError::InvalidScale { .. }
            | AvError::InvalidLag { .. }
            | AvError::Domain { .. }
            | AvError::Config(_) => CliError::Config(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
