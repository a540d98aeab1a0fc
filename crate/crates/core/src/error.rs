use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: unsupported image format")]
    UnsupportedFormat { path: PathBuf },
    #[error("{path}: {message}")]
    Decode { path: PathBuf, message: String },
    #[error("image has zero width or height")]
    EmptyImage,
    #[error("noise fraction {0} is outside [0, 1]")]
    InvalidFraction(f64),
    #[error("segment of {len} pixels is too short (need at least {min})")]
    SegmentTooShort { len: usize, min: usize },
    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("primitive does not fit the canvas: {0}")]
    OutOfBounds(String),
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
