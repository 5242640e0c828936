use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed gate: {0}")]
    InvalidGate(String),

    #[error("qubit {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} appears more than once in the target list")]
    DuplicateTarget(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: bad magic number {found} (expected {expected})")]
    BadMagic {
        path: PathBuf,
        expected: u32,
        found: u32,
    },

    #[error("{path}: truncated file ({detail})")]
    Truncated { path: PathBuf, detail: String },

    #[error("image/label count mismatch: {images} images, {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error classes surfaced by the CLI as distinct exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numeric,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numeric => 4,
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidGate(_)
            | Error::QubitOutOfRange { .. }
            | Error::DuplicateTarget(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::Config(_) => ErrorCategory::Config,
            Error::BadMagic { .. }
            | Error::Truncated { .. }
            | Error::CountMismatch { .. }
            | Error::Format(_)
            | Error::Io(_) => ErrorCategory::Data,
            Error::Degenerate(_) | Error::Numeric(_) => ErrorCategory::Numeric,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
