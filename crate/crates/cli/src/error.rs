use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// One rejected configuration field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", list(.0))]
    Validation(Vec<FieldError>),
    #[error(transparent)]
    Compute(#[from] accelphase::Error),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{failed} check(s) failed")]
    CheckFailed { failed: usize },
}

fn list(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 validation, 2 I/O, 3 check failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Compute(_) => 1,
            CliError::Io { .. } => 2,
            CliError::CheckFailed { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
