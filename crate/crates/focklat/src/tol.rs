//! Numeric tolerance hierarchy used across the crate.
//!
//! Construction and algebraic identities are held to [`ALGEBRA`]; anything
//! that passes through an eigen- or singular-value solver is held to the
//! looser [`SPECTRAL`]. Density matrices may acquire tiny negative
//! eigenvalues from rounding, bounded by [`PSD_FLOOR`].

/// Algebraic identities evaluated with plain arithmetic (norms, traces,
/// completeness sums, recursions).
pub const ALGEBRA: f64 = 1e-12;

/// Quantities obtained from double-precision eigen/SVD solvers.
pub const SPECTRAL: f64 = 1e-10;

/// Structural checks that hold to machine precision (Hermiticity of
/// analytically Hermitian constructions).
pub const STRICT: f64 = 1e-14;

/// Smallest admissible eigenvalue of a positive semidefinite matrix.
pub const PSD_FLOOR: f64 = -1e-10;
