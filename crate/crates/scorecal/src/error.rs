//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the calibration library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of an operation
    /// (probability outside [0,1], nonpositive shape parameter, empty
    /// trial class, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to reach its accuracy target.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Input data is structurally valid but degenerate for the requested
    /// operation (e.g. zero score variance makes the calibration scale
    /// unidentifiable).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A text input failed to parse. `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
