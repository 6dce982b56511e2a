//! Library side of the `hermlat` command: compute commands, verification
//! suites and their JSON report.

pub mod commands;
pub mod report;
pub mod suites;

use hermlat_core::Error;

/// Exit status classes of the command.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or out-of-domain input; exit code 2.
    Input(String),
    /// A computation contradicted itself; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(_) => CliError::Failure(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
