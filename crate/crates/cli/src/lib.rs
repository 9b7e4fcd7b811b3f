//! Command-line front end for the modular-variable simulator.
//!
//! The library half of the binary: config loading ([`config`]), byte-stable
//! artifact serialization ([`output`]), and the subcommand implementations
//! ([`commands`]). Failures are classified by [`CliError`] so the binary can
//! map each class to its reserved process exit code.

use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;

/// Process-level failure classes, one per reserved exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config, circuit, or input data. Exit code 2.
    #[error("{0}")]
    Config(String),
    /// A numerical self-check or verify suite failed. Exit code 3.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// An output artifact could not be written. Exit code 4.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// The process exit code reserved for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<modvar::Error> for CliError {
    fn from(e: modvar::Error) -> CliError {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
