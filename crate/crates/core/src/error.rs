use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("exponent overflow at byte {offset}")]
    ExponentOverflow { offset: usize },
    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { offset: usize, name: String },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("zero divisor in quotient ring (modulus splits)")]
    ZeroDivisor,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for parse-type failures (exit code 2 in the CLI).
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::ExponentOverflow { .. } | Error::UnknownVariable { .. }
        )
    }
}
