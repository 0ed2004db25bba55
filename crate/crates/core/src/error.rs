use std::path::PathBuf;

/// Errors raised by the optimizer engine, benchmarks, metrics and harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid bounds in dimension {dim}: lower {lower} must be < upper {upper}")]
    InvalidBounds { dim: usize, lower: f64, upper: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("distance must be strictly positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("swarm has {0} particle(s); attractor selection needs at least 2")]
    SwarmTooSmall(usize),

    #[error("neighbor count {n} must be smaller than swarm size {population}")]
    TooManyNeighbors { n: usize, population: usize },

    #[error("unknown {kind} '{name}', expected one of: {valid}")]
    UnknownName {
        kind: &'static str,
        name: String,
        valid: String,
    },

    #[error("catalog file {path} is incompatible: {reason}")]
    IncompatibleCatalog { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error on {path}: {source}")]
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

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
