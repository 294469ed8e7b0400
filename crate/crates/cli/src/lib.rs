//! Library side of the `armform` command-line tool: scenario files,
//! built-in cases, artifact emission, and CSV-based verification.

pub mod emit;
pub mod scenario;
pub mod svg;

use thiserror::Error;

/// CLI failure classes, one per exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("{0}")]
    Divergence(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 0 success/verified, 1 usage or I/O, 2 scenario validation,
    /// 3 divergence, 4 verification failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Scenario(_) => 2,
            CliError::Divergence(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<armform::Error> for CliError {
    fn from(e: armform::Error) -> Self {
        match e {
            armform::Error::Divergence { .. } => CliError::Divergence(e.to_string()),
            _ => CliError::Scenario(e.to_string()),
        }
    }
}
