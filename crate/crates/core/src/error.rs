use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inadmissible shock: {0}")]
    Inadmissible(String),

    #[error("wave configuration is not rarefaction-contact-shock: {0}")]
    ConfigurationMismatch(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { what: String, iterations: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("CFL violation: dt = {dt:e} exceeds limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("positivity lost in {field} at index {index} (value {value:e})")]
    Positivity {
        field: &'static str,
        index: usize,
        value: f64,
    },

    #[error("corrupted kinetic state at cell {cell}: {what}")]
    CorruptedState { cell: usize, what: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
