use thiserror::Error;

use crate::optimize::OptTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid target bit string: {0}")]
    InvalidTarget(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The objective returned NaN or an infinity. The partial trace up to and
    /// including the offending evaluation is attached.
    #[error("objective returned non-finite value {value} at evaluation {nfev}")]
    NonFiniteObjective {
        value: f64,
        nfev: usize,
        trace: Box<OptTrace>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
