//! CLI error type with the documented exit-code mapping.

use hhq_core::SimError;
use std::fmt;

/// Errors surfaced by the command line; each maps to a distinct exit code
/// (0 ok, 2 parse, 3 integration, 4 resolution, 5 I/O).
#[derive(Debug)]
pub enum CliError {
    /// Scenario text or argument problem (exit 2).
    Parse { line: Option<usize>, msg: String },
    /// Numerical failure during a run (exit 3).
    Integration(String),
    /// Grid cannot resolve the fastest scale (exit 4).
    Resolution(String),
    /// Filesystem failure (exit 5).
    Io(String),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse {
            line: None,
            msg: msg.into(),
        }
    }

    pub fn parse_at(line: usize, msg: impl Into<String>) -> Self {
        CliError::Parse {
            line: Some(line),
            msg: msg.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Integration(_) => 3,
            CliError::Resolution(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { line: Some(l), msg } => write!(f, "parse error (line {l}): {msg}"),
            CliError::Parse { line: None, msg } => write!(f, "parse error: {msg}"),
            CliError::Integration(msg) => write!(f, "integration error: {msg}"),
            CliError::Resolution(msg) => write!(f, "resolution error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Integration { .. } | SimError::Instability(_) | SimError::Quadrature(_) => {
                CliError::Integration(e.to_string())
            }
            SimError::Resolution(_) => CliError::Resolution(e.to_string()),
            other => CliError::parse(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
