use std::fmt;

/// Errors raised by the engines, the file parsers, and the campaigns.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Input text failed to parse; positions are 1-based.
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    /// A value violates a documented precondition or invariant.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A move or answer was rejected before game rules were evaluated.
    #[error("malformed move: {0}")]
    Malformed(String),
    /// An exhaustive search would exceed its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// A lemma the engine relies on was observed to fail.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Filesystem failure (message only, so the type stays `Clone`).
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl fmt::Display) -> Error {
    Error::Invalid(msg.to_string())
}

pub(crate) fn parse_err(line: usize, col: usize, msg: impl fmt::Display) -> Error {
    Error::Parse { line, col, msg: msg.to_string() }
}
