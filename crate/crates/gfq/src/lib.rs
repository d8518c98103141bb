//! Gaussian quantum optics toolkit: phase-space representations of Gaussian
//! states, unitaries and channels, their Fock amplitudes generated by a single
//! second-order recurrence over Bargmann triples `(A, b, c)`, global-phase
//! tracking under composition, and Riemannian gradient descent on the
//! symplectic and unitary groups for optimizing whole Gaussian blocks.

pub mod bargmann;
pub mod composition;
pub mod experiments;
pub mod fock;
pub mod linalg;
pub mod opt;
pub mod phase_space;

use thiserror::Error;

/// Library-wide default value of ħ. Every formula still carries ħ explicitly,
/// so callers may run any computation at a different convention.
pub const DEFAULT_HBAR: f64 = 2.0;

/// Reads the `GFQ_HBAR` environment override, falling back to [`DEFAULT_HBAR`].
pub fn hbar_from_env() -> f64 {
    std::env::var("GFQ_HBAR")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|h| *h > 0.0)
        .unwrap_or(DEFAULT_HBAR)
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("singular matrix in {0}")]
    SingularMatrix(&'static str),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
