//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A weighted integral would diverge for the requested exponents.
    #[error("non-integrable weight: {0}")]
    Integrability(String),

    /// An element is not a parallelogram, or is degenerate.
    #[error("geometry error in element {element}: {reason}")]
    Geometry { element: usize, reason: String },

    /// Hanging nodes or edges shared by more than two elements.
    #[error("non-conforming mesh: {0}")]
    Conformity(String),

    #[error("orientation error: {0}")]
    Orientation(String),

    /// A documented precondition of a construction does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Conjugate gradients met a direction of non-positive curvature.
    #[error(
        "system matrix is not positive definite (curvature {curvature:e} at iteration {iteration})"
    )]
    NotPositiveDefinite { iteration: usize, curvature: f64 },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
