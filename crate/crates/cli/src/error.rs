use std::fmt;

use claimforge_core::Error as CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments, bad config, or unreadable inputs.
    Usage,
    /// Input files were read but their content is invalid.
    Data,
    /// Anything else, including failures writing outputs.
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Usage,
            error: anyhow::anyhow!(message.into()),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Data,
            error: anyhow::anyhow!(message.into()),
        }
    }

    pub fn internal(error: impl Into<anyhow::Error>) -> Self {
        CliError {
            kind: ErrorKind::Internal,
            error: error.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Usage => 1,
            ErrorKind::Data => 2,
            ErrorKind::Internal => 3,
        }
    }

    pub fn context(self, what: impl fmt::Display) -> Self {
        CliError {
            kind: self.kind,
            error: self.error.context(what.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let kind = if e.is_data_error() {
            ErrorKind::Data
        } else {
            ErrorKind::Usage
        };
        CliError { kind, error: e.into() }
    }
}
