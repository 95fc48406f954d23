//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by solvers, estimators, and I/O across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Vector or operator dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A normalized state was required but |Σ|ψ|² − 1| exceeded tolerance.
    #[error("state is not normalized: |Σ|ψ|² − 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// Model parameters violate a structural constraint.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Requested system size exceeds what this code path supports.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: String, iterations: usize },

    /// An internal self-check on accumulated quantities failed.
    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    /// Parameters or estimates became non-finite during optimization.
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    /// A local estimator or amplitude was requested at a zero-amplitude configuration.
    #[error("zero amplitude: {0}")]
    ZeroAmplitude(String),

    /// Invalid run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
