//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseOcError {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative solver ran out of iterations before reaching tolerance.
    #[error("{solver} failed to converge: residual {residual:.3e} after {iterations} iterations")]
    SolverFailure {
        solver: &'static str,
        residual: f64,
        iterations: usize,
    },

    /// A NaN or infinity showed up in a field; the run cannot continue.
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SparseOcError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        SparseOcError::InvalidArgument(msg.into())
    }
}
