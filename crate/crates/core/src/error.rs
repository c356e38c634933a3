//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Malformed text input (WFDB header, annotation manifest, CSV).
    Parse { line: usize, message: String },
    /// WFDB storage format other than 16.
    UnsupportedFormat(u16),
    /// Byte/sample count disagreement.
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// Input violates a documented precondition or invariant.
    Validation(String),
    /// A numerical routine failed (non-convergence, ill-posed input).
    Numeric(String),
    /// A feature is undefined on this input (e.g. zero in-band power).
    UndefinedFeature(&'static str),
    /// Training data cannot support a fit (e.g. single-class labels).
    Unfittable(String),
    /// Feature-count mismatch between training and prediction.
    ShapeMismatch { expected: usize, actual: usize },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::UnsupportedFormat(code) => write!(f, "unsupported WFDB signal format {code}"),
            Error::LengthMismatch {
                what,
                expected,
                actual,
            } => write!(f, "length mismatch in {what}: expected {expected}, got {actual}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::Numeric(msg) => write!(f, "numerical error: {msg}"),
            Error::UndefinedFeature(what) => write!(f, "feature undefined: {what}"),
            Error::Unfittable(msg) => write!(f, "cannot fit model: {msg}"),
            Error::ShapeMismatch { expected, actual } => {
                write!(f, "feature count mismatch: model expects {expected}, got {actual}")
            }
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
