use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is invalid; `key` names the offending parameter.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The channel matrix lost column rank beyond the solver tolerance.
    #[error("singular channel: {0}")]
    SingularChannel(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("missing weight for user {0}")]
    MissingWeight(usize),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("numerical integration failed: {0}")]
    Integration(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
