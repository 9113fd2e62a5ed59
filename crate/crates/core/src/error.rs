use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator symbol `{0}`")]
    UnknownGenerator(String),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit { what: String, cap: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("violation at {at}: {detail}")]
    Violation { at: String, detail: String },
}

impl Error {
    pub(crate) fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse { input: input.into(), reason: reason.into() }
    }

    pub(crate) fn violation(at: impl std::fmt::Display, detail: impl Into<String>) -> Self {
        Error::Violation { at: at.to_string(), detail: detail.into() }
    }

    pub(crate) fn limit(what: impl Into<String>, cap: u64) -> Self {
        Error::ResourceLimit { what: what.into(), cap }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
