use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Extents that do not line up (contraction, reshape, non-square input).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A value that violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A request that would exceed a configured memory or enumeration budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// Arguments that are individually valid but do not fit together.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Dimension(_) | Error::Validation(_) | Error::Parse { .. } => 3,
            Error::Resource(_) => 4,
            Error::Io(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
