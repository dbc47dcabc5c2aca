//! Command-line front end for `mimo-duel`: configuration files, figure
//! presets, CSV curve tables and the verification report.

pub mod config;
pub mod figures;
pub mod table;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("I/O error: {0}")]
    Io(String),
    #[error("acceptance failed: {0}")]
    Acceptance(String),
    #[error(transparent)]
    Core(mimo_duel::Error),
}

impl CliError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config { key: key.into(), reason: reason.into() }
    }

    /// 2 for configuration problems, 3 for I/O, 4 for failed acceptance.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Io(_) => 3,
            CliError::Acceptance(_) => 4,
            CliError::Core(_) => 1,
        }
    }
}

impl From<mimo_duel::Error> for CliError {
    fn from(e: mimo_duel::Error) -> Self {
        match e {
            mimo_duel::Error::Config { key, reason } => CliError::Config { key, reason },
            other => CliError::Core(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
