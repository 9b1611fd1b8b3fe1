//! Experiment runner and single-problem tools behind the `orcon` binary.

pub mod commands;
pub mod config;

use std::fmt;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// A check did not pass or some runs failed (exit 1).
    Failed(String),
    /// Malformed config, arguments or input files (exit 2).
    Input(String),
    /// Reading or writing files failed (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Failed(_) => 1,
            Self::Input(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Failed(m) | Self::Input(m) | Self::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<orcon::Error> for CliError {
    fn from(e: orcon::Error) -> Self {
        use orcon::Error as E;
        match e {
            E::Io(_) => Self::Io(e.to_string()),
            E::Csv(ref c) if c.is_io_error() => Self::Io(e.to_string()),
            E::Csv(_) | E::InvalidArgument(_) | E::DimensionMismatch { .. } | E::TooLarge { .. } => {
                Self::Input(e.to_string())
            }
            _ => Self::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
