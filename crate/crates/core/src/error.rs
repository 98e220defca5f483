//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("feature dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} predictions vs {right} gold labels")]
    LengthMismatch { left: usize, right: usize },

    #[error("no hidden label for instance id {0}")]
    MissingHiddenLabel(u64),

    #[error("trace has no validation snapshot at iteration {0}")]
    MissingSnapshot(usize),

    #[error("model file {path} has unsupported version {version}")]
    UnsupportedModelVersion { path: String, version: u32 },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// True for errors caused by bad configuration or arguments rather than
    /// by data encountered at runtime. The CLI maps these to exit code 1.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::DimensionMismatch { .. }
        )
    }
}
