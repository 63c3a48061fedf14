use thiserror::Error;

/// Failures of a CLI run other than verification failures.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config keys or parameter values.
    #[error("usage error: {0}")]
    Usage(String),

    /// A file could not be read or written.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A module driver failed after its inputs were accepted.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// Exit status for the error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => crate::EXIT_USAGE,
            CliError::Io(_) | CliError::Runtime(_) => crate::EXIT_FAILURE,
        }
    }
}
