use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] noisy_distill::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
    #[error("csv encoding: {0}")]
    Csv(#[from] csv::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Bad input (malformed or out of domain) exits 2; everything else exits 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Domain(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}
