use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: `{field}` {reason}")]
    Config { field: &'static str, reason: String },

    #[error("failed to parse configuration {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("cost of a zero-bit transfer is undefined")]
    ZeroBits,

    #[error(transparent)]
    Knapsack(#[from] KnapsackError),

    #[error("no candidate nodes left for head selection")]
    NoCandidates,

    #[error("network is dead: residual energy sum is zero")]
    NetworkDead,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    TraceParse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("empty report: {0}")]
    EmptyReport(&'static str),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KnapsackError {
    #[error("values and weights differ in length ({values} vs {weights})")]
    LengthMismatch { values: usize, weights: usize },

    #[error("item {index} has a negative or non-finite {what}")]
    BadItem { index: usize, what: &'static str },

    #[error("capacity must be finite and non-negative")]
    BadCapacity,

    #[error("quantization scale must be at least 1")]
    BadScale,

    #[error("quantized instance too large ({items} items x {capacity} capacity)")]
    TooLarge { items: usize, capacity: u64 },

    #[error("brute-force oracle limited to {max} items, got {got}")]
    OracleTooLarge { max: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
