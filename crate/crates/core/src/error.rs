use std::fmt;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A level index outside `[0..n]`.
    LevelOutOfRange { level: usize, n: usize },
    /// A search point whose length does not match the function dimension.
    DimensionMismatch { expected: usize, actual: usize },
    /// An operation that is only defined for Jump was called on another function.
    NotJump { found: &'static str },
    /// A parameter outside its documented range.
    InvalidParameter { name: &'static str, message: String },
    /// An algorithm name that `baseline_config` does not recognize.
    UnknownAlgorithm { name: String },
    /// An empty sample sequence where at least one value is required.
    EmptyInput { what: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LevelOutOfRange { level, n } => {
                write!(f, "level {level} out of range [0..{n}]")
            }
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::NotJump { found } => {
                write!(f, "operation requires a Jump function, got {found}")
            }
            Error::InvalidParameter { name, message } => {
                write!(f, "invalid parameter `{name}`: {message}")
            }
            Error::UnknownAlgorithm { name } => write!(f, "unknown algorithm `{name}`"),
            Error::EmptyInput { what } => write!(f, "empty input: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        message: message.into(),
    }
}
