use std::fmt;

use abelian_walk::WalkError;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Malformed JSON, wrong types, unknown keys. Exit 2.
    Parse(String),
    /// Well-formed input that violates a mathematical requirement. Exit 3.
    Validation(String),
    /// Input too large to process. Exit 4.
    Capacity(String),
    /// File system trouble. Exit 1.
    Io(String),
    /// `verify` ran and at least one check failed. Exit 1.
    ChecksFailed(usize),
}

impl CliError {
    pub fn from_walk(key: &str, e: WalkError) -> Self {
        match e {
            WalkError::Capacity { .. } => CliError::Capacity(format!("{key}: {e}")),
            _ => CliError::Validation(format!("{key}: {e}")),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Capacity(_) => 4,
            CliError::Io(_) | CliError::ChecksFailed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Capacity(m) => write!(f, "capacity error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}
