use std::fmt::Display;

use thiserror::Error;

/// Failure classes, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config<E: Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

pub fn numerical<E: Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}
