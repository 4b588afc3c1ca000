use thiserror::Error;

/// Errors surfaced by problem construction, certification and solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("entries must be finite (no NaN or infinity)")]
    NonFinite,

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("singular linear part; the map cannot be inverted")]
    SingularOperator,

    #[error("iteration did not converge within {max_iters} steps (last error {last_error:e})")]
    NoConvergence { max_iters: usize, last_error: f64 },

    #[error("infeasible constants: {0}")]
    InfeasibleConstants(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
