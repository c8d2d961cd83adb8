use thiserror::Error;

/// Errors reported by basis construction, operator builders and channels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),

    #[error("dimension limit exceeded: {0}")]
    DimensionLimit(String),

    #[error("numerical invariant violated: {0}")]
    NumericalInvariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::BasisMismatch(msg.into())
    }
}
