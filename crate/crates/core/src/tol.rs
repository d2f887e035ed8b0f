//! Central tolerance and guard constants.
//!
//! All closed forms in this crate are evaluated in double precision with
//! roundoff near 1e-15, so equality-type checks get absolute tolerances a few
//! orders above that. Guards on feedback loops reflect the fact that the
//! composed coefficients diverge at the self-oscillation point.

/// Default absolute tolerance for constraint residuals and physicality verdicts.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-10;

/// Tolerance for Gram-data preservation under basis changes.
pub const GRAM_TOL: f64 = 1e-12;

/// Maximum admissible deviation of a matrix from unitarity.
pub const UNITARY_TOL: f64 = 1e-12;

/// Minimum admissible magnitude of the closed-form feedback loop denominator.
pub const LOOP_DENOMINATOR_MIN: f64 = 1e-9;

/// Maximum admissible condition number of the generic feedback loop matrix.
pub const LOOP_CONDITION_MAX: f64 = 1e9;

/// Relative cutoff on residual column norms in basis reduction.
pub const BASIS_RANK_CUTOFF: f64 = 1e-12;

/// Default central finite-difference step for Jacobian evaluation.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Default relative singular-value threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Hard cap on the number of time bins accepted by the discretized oracle.
pub const ORACLE_MAX_BINS: usize = 100_000;
