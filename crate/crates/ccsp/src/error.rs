use std::fmt;

/// Library-wide error type. The CLI maps each variant to a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad input data or a violated operation precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A configurable cap (search nodes, enumeration size, closure size) was hit.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// An internal structural invariant failed; signals a bug upstream.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    /// Malformed language or instance file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn arg(msg: impl fmt::Display) -> Error {
        Error::Argument(msg.to_string())
    }

    pub fn resource(msg: impl fmt::Display) -> Error {
        Error::Resource(msg.to_string())
    }

    pub fn invariant(msg: impl fmt::Display) -> Error {
        Error::Invariant(msg.to_string())
    }

    pub fn parse(line: usize, msg: impl fmt::Display) -> Error {
        Error::Parse {
            line,
            msg: msg.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
