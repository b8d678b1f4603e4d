//! Error type shared by all subcommands, carrying the process exit code:
//! 1 for usage errors, 2 for data errors, 3 for internal invariant
//! violations.

use std::fmt;

use mcsched::benchmark::BenchmarkError;
use mcsched::ga::GaError;
use mcsched::model::ModelError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag values; exit code 1.
    Usage(String),
    /// Unreadable or invalid input data; exit code 2.
    Data(String),
    /// A violated internal invariant; exit code 3.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl From<BenchmarkError> for CliError {
    fn from(err: BenchmarkError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<GaError> for CliError {
    fn from(err: GaError) -> Self {
        match err {
            // Bad run parameters come from flags or config files.
            GaError::InvalidConfig(msg) => CliError::Usage(msg),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}
