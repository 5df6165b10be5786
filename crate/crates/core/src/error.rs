use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("capacity error: dimension {dim} exceeds the configured maximum {max}")]
    Capacity { dim: usize, max: usize },

    #[error("topology error: ({0}, {1}) is not an edge of the device topology")]
    Topology(usize, usize),

    #[error("bounds error: parameter `{name}` = {value} outside [{lo}, {hi}]")]
    Bounds {
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("binding error: {0}")]
    Binding(String),

    #[error("lowering error: {0}")]
    Lowering(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("tomography fit residual {residual:.3e} above tolerance {tolerance:.3e}")]
    Tomography { residual: f64, tolerance: f64 },

    #[error("growth policy exhausted after {0} steps")]
    GrowthExhausted(usize),

    #[error("objective evaluation failed: {0}")]
    Evaluation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input (files, configs, arguments).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Json { .. }
                | Error::Parse { .. }
                | Error::Validation(_)
                | Error::Topology(..)
                | Error::Bounds { .. }
        )
    }
}
