//! Batch front end for the `bsshell-core` shell toolkit: configuration,
//! commands and machine-readable reports.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::path::PathBuf;

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or failed precondition (exit code 2).
    Config(String),
    /// Numerical or IO failure during the computation (exit code 1).
    Compute(String),
}

impl CliError {
    pub fn config(e: impl fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn compute(e: impl fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Command-independent settings from the command line.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out: PathBuf,
    /// Overrides every seed of the configuration.
    pub seed: Option<u64>,
    pub quiet: bool,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// All checks held (or the solve converged).
    pub passed: bool,
    pub summary: Vec<String>,
}
