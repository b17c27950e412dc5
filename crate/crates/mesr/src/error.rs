//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid pgm file {path}: {reason}")]
    PgmFormat { path: PathBuf, reason: String },

    #[error("inconsistent dimensions: expected {expected_width}x{expected_height}, got {width}x{height} ({context})")]
    InconsistentDimensions {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
        context: String,
    },

    #[error("invalid frame data: {0}")]
    InvalidFrame(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("region out of bounds: {0}")]
    OutOfBounds(String),

    #[error("tracking diverged at frame {frame}: {reason}")]
    TrackingDiverged { frame: usize, reason: String },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit code classification for the command-line front end:
    /// 1 for validation problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::InvalidParameter(_) | Error::Parse { .. } => 1,
            _ => 2,
        }
    }
}
