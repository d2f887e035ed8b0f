//! Quantum-noise model of realistic high-Q cavities.
//!
//! A cavity with absorption and scattering losses is described, at the
//! c-number level, by a decay rate, a resonance frequency, per-port
//! transmission/reflection coefficients, and noise-coupling vectors in a
//! shared basis. Preserving bosonic commutators confines these coefficients
//! to a constraint manifold; beam-splitter replacement schemes parametrize
//! that manifold, completely or degenerately. This crate provides:
//!
//! - [`model`]: the coefficient data model, constraint residuals, inequality
//!   slacks, and physicality verdicts;
//! - [`geometry`]: the unitary-space view of the noise operators (scalar
//!   products, Gram data, cross-coefficient decomposition, basis reduction
//!   and rotation);
//! - [`scheme`]: closed-form composition of the complete and degenerate
//!   one-sided replacement schemes, a generic feedback-elimination engine
//!   over unitary scattering networks, and the two-sided scheme;
//! - [`manifold`]: completeness analysis of scheme parametrizations by
//!   numerical Jacobian rank;
//! - [`dynamics`]: exact linear dynamics, commutator kernels, trajectory
//!   simulation, extraction efficiency, and a discretized brute-force
//!   commutator oracle;
//! - [`io`]: strict JSON file formats for coefficient sets and schemes;
//! - [`sampling`]: seeded parameter draws for sweeps and rank analysis.
//!
//! Rates are in inverse time with a free time unit; the bundled examples use
//! decay-rate-normalized units.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod manifold;
pub mod model;
pub mod sampling;
pub mod scheme;
pub mod tol;

#[cfg(test)]
pub(crate) mod testkit;

pub use error::{CavityError, Result};
pub use model::{
    constraint_residuals, ideal_cavity, ideal_reflection, inequality_slacks, is_physical,
    CavityCoefficients, ConstraintReport, RadiativePort,
};
