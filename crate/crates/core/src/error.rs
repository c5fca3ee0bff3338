//! Error type shared across the library.

use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("write failed (output may be partial): {0}")]
    Write(#[source] io::Error),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("clone of {url} failed: {reason}")]
    Clone { url: String, reason: String },

    #[error("undefined density: denominator is zero")]
    UndefinedDensity,

    #[error("recall {0} outside (0, 1]")]
    RecallOutOfRange(f64),

    #[error("zero loop count, fraction undefined")]
    UndefinedLoopFraction,

    #[error("oracle parse error in {file} at line {line}: {message}")]
    OracleParse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("judgment file error: {0}")]
    Judgment(String),

    #[error("unjudged detections: {}", .0.join(", "))]
    Unjudged(Vec<String>),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
