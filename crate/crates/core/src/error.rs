//! Error type shared by every module in the crate.

use std::fmt;

/// Crate-wide error. Variants map onto the CLI exit codes:
/// `Shape`/`Validation`/`State`/`Format`/`Floor` are usage errors (exit 1),
/// `Numerical` is a computation failure (exit 2).
#[derive(Debug)]
pub enum Error {
    /// Tensor/matrix dimensions do not satisfy an operation's contract.
    Shape(String),
    /// Invalid argument values (NaN/Inf inputs, out-of-range parameters).
    Validation(String),
    /// A computation failed to converge or produced non-finite values.
    Numerical(String),
    /// An operation was invoked before its prerequisite state existed.
    State(String),
    /// A file did not match its expected on-disk format.
    Format(String),
    /// Dimension reduction was asked to go below one retained channel.
    Floor(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
            Error::State(msg) => write!(f, "state error: {msg}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::Floor(msg) => write!(f, "reduction floor: {msg}"),
            Error::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
