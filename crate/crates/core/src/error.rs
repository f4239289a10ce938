use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("k must lie in (0, 100], got {0}")]
    InvalidPercentage(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("position {position} out of range for length {len}")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the underlying file system rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

/// Rejects percentages outside `(0, 100]`.
pub fn check_percentage(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 && k <= 100.0 {
        Ok(())
    } else {
        Err(Error::InvalidPercentage(k))
    }
}
