//! Numerical toolkit for quaternionic slice functions on the unit sphere of H.
//!
//! Functions are modelled as finitely supported Laurent series `Σ qⁿ aₙ` with
//! quaternion coefficients on the right. The crate provides their star-product
//! algebra, boundary sampling, slice idempotents, Toeplitz models of multiplier
//! operators, and a shift-invariant subspace engine with inner-outer factorization.

pub mod boundary;
pub mod error;
pub mod idempotents;
pub mod operators;
pub mod periodic;
pub mod quaternion;
pub mod sampling;
pub mod series;
pub mod subspaces;
pub mod suites;

/// Absolute zero tolerance for quaternion norms.
pub const EPS0: f64 = 1e-12;

/// Default bound on `|n|` for coefficient indices.
pub const DEFAULT_MAX_DEGREE: i64 = 256;

pub use boundary::BoundaryGrid;
pub use error::{Error, Result};
pub use quaternion::{exp_unit, Quaternion, UnitImaginary};
pub use series::{SliceLaurentSeries, Support};
