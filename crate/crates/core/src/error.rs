use std::fmt;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scenario or model parameter is out of range.
    Config { key: String, message: String },
    /// A scenario file line could not be parsed.
    Parse { line: usize, message: String },
    /// A numeric input lies outside the domain of a model function.
    Domain(String),
    /// A caller broke an operation's precondition.
    Contract(String),
}

impl Error {
    pub(crate) fn config(key: &str, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config { key, message } => write!(f, "invalid value for `{key}`: {message}"),
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
