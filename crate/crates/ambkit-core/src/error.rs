//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two signals that must share a sampling lattice do not.
    #[error("sampling lattice mismatch: {0}")]
    LatticeMismatch(String),

    /// A requested grid point does not land on a lattice the exact
    /// transform path can evaluate.
    #[error("grid not aligned with signal lattice: {0}")]
    GridAlignment(String),

    /// Moments and normalized densities are undefined for zero energy.
    #[error("zero-energy signal")]
    ZeroEnergy,

    /// A relation id outside the suite catalog was requested.
    #[error("unknown relation id: {0}")]
    UnknownRelation(String),

    /// A relation was requested on inputs that do not satisfy its
    /// stated hypotheses.
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// On-disk data does not match the documented format.
    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
