use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or vector shapes do not line up (structural misuse).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An index referred to a row or column that does not exist.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A guarded computation would exceed its configured size cap.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    /// An iterative solver stopped before reaching its tolerance.
    #[error("no convergence after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { residual: f64, sweeps: u64 },

    /// A configuration file or flag set is unusable.
    #[error("config error: {0}")]
    Config(String),

    /// Text input (CSV, integer list) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
