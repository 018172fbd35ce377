use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("level {level} out of range {min}..={max}")]
    LevelRange { level: i32, min: i32, max: i32 },

    #[error("invalid state: {0}")]
    State(String),

    #[error("operator is not injective at this truncation: sigma_min = {sigma_min:e}, tolerance = {tolerance:e}")]
    Injectivity { sigma_min: f64, tolerance: f64 },

    #[error("continuity certificate overflow: {0}")]
    Continuity(String),

    #[error("grid support too small for Hermite function n = {n}: mass outside [-L, L] is {mass:e}")]
    Support { n: usize, mass: f64 },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: u64,
        column: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
