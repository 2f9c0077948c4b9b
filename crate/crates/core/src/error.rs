use thiserror::Error;

use crate::subspaces::FactorizationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by a quaternion of norm below the zero tolerance")]
    ZeroDivision,

    #[error("support [{lo}, {hi}] exceeds max_degree {max_degree}")]
    SupportOverflow { lo: i64, hi: i64, max_degree: i64 },

    #[error("function value vanishes at the requested point")]
    ZeroValue,

    #[error("series is not *-invertible: leading coefficient of the symmetrization has norm {0:e}")]
    NotInvertible(f64),

    #[error("imaginary units are (nearly) equal")]
    DegenerateUnits,

    #[error("sphere at t = {t} is not classifiable: {reason}")]
    Unclassifiable { t: f64, reason: String },

    #[error("series support [{lo}, {hi}] is outside the ambient support [{ambient_lo}, {ambient_hi}]")]
    AmbientMismatch { lo: i64, hi: i64, ambient_lo: i64, ambient_hi: i64 },

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("series is not in H² (nonzero coefficient at index {0})")]
    NotHardy(i64),

    #[error("no wandering direction: every generator lies in the shifted subspace at this truncation")]
    DoublyInvariant,

    #[error("factorization post-checks failed: {}", .0.summary())]
    FactorizationResidual(Box<FactorizationReport>),

    #[error("Blaschke zero |a| = {0} is too close to the boundary (need |a| <= 0.7)")]
    PointTooCloseToBoundary(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid idempotent spec: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
