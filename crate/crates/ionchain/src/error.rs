//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The equilibrium solver ran out of iterations.
    #[error("equilibrium solve did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A precondition on user-supplied input failed. The message names the
    /// offending field or argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A state or matrix failed a physical validity check.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// An eigensolver or other numerical kernel failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Population leaked into the top Fock level beyond the health threshold.
    #[error("Fock truncation leak: top-level population {leaked:.3e} exceeds {threshold:.1e}; increase fock_dim")]
    TruncationLeak { leaked: f64, threshold: f64 },

    /// The perturbative regime bound was violated.
    #[error("perturbative regime violated: |E_A|^2 + |E_B|^2 = {excitation:.3e} > 0.1; reduce the drive amplitude")]
    RegimeViolation { excitation: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Numerical(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
