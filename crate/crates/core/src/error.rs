//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user input was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Geometric input is degenerate or inconsistent (self-intersecting
    /// polygon, zero-area triangle, non-conforming mesh, ...).
    #[error("geometry error: {0}")]
    Geometry(String),
    /// A linear system was (numerically) singular.
    #[error("near-singular system: {0}")]
    NearSingular(String),
    /// An adaptive quadrature or doubling loop failed to converge.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergent(String),
    /// Non-finite value encountered where finite data is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// Violated internal invariant; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
