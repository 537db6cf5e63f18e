use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),
    /// Division by zero and friends.
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    /// An enumeration would exceed the configured size bound.
    #[error("capacity exceeded: {what} needs {needed} elements, bound is {bound}")]
    Capacity {
        what: String,
        needed: u128,
        bound: u128,
    },
    /// A trace function was queried above its level bound.
    #[error("level {level} exceeds the level bound {bound}")]
    Level { level: usize, bound: usize },
    /// An invalid transform or run configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// The requested group presentation is unavailable in this characteristic.
    #[error("presentation error: {0}")]
    Presentation(String),
    /// A series operation would run past its precision or denominator budget.
    #[error("precision error: {0}")]
    Precision(String),
    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, needed: u128, bound: u128) -> Self {
        Error::Capacity {
            what: what.into(),
            needed,
            bound,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
