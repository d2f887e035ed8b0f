//! Error type shared by all modules of the crate.

use std::fmt;

/// Errors produced by validation, composition, and analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum CavityError {
    /// Vector or matrix dimensions do not agree.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// A coefficient or parameter is NaN or infinite.
    NonFinite { what: &'static str },
    /// A rate parameter is outside its admissible range.
    InvalidRate { what: &'static str, value: f64 },
    /// Division by a zero coefficient.
    ZeroDivisor { what: &'static str },
    /// The operation is defined only for models with this many radiative ports.
    PortCount { expected: usize, got: usize },
    /// Angle decomposition requested for a zero-length noise vector.
    UndefinedAngle,
    /// A matrix that must be unitary deviates from unitarity by this much.
    NonUnitary { deviation: f64 },
    /// Feedback loop denominator too close to the self-oscillation point.
    NearSingularFeedback { denominator: f64 },
    /// Feedback loop matrix condition number exceeds the admissible bound.
    IllConditionedLoop { condition: f64 },
    /// Scattering network fails a structural check.
    MalformedNetwork(String),
    /// Scheme parameters fail validation for the declared kind.
    SchemeValidation(String),
    /// A finite-difference stencil point could not be evaluated.
    StencilFailure { parameter: String },
    /// Time grid is empty or not strictly increasing.
    InvalidGrid(String),
    /// A resource bound (step count, sample count) was exceeded.
    ResourceBound(String),
    /// Input file could not be parsed or is inconsistent.
    Parse(String),
    /// Underlying I/O failure.
    Io(String),
}

impl fmt::Display for CavityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CavityError::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, got {got}"),
            CavityError::NonFinite { what } => write!(f, "non-finite value in {what}"),
            CavityError::InvalidRate { what, value } => {
                write!(f, "invalid rate {what} = {value}")
            }
            CavityError::ZeroDivisor { what } => write!(f, "division by zero {what}"),
            CavityError::PortCount { expected, got } => {
                write!(f, "operation requires {expected} radiative port(s), model has {got}")
            }
            CavityError::UndefinedAngle => {
                write!(f, "angle decomposition undefined for a zero noise vector")
            }
            CavityError::NonUnitary { deviation } => {
                write!(f, "matrix is not unitary (max deviation {deviation:.3e})")
            }
            CavityError::NearSingularFeedback { denominator } => {
                write!(f, "feedback loop near self-oscillation (|denominator| = {denominator:.3e})")
            }
            CavityError::IllConditionedLoop { condition } => {
                write!(f, "feedback loop matrix ill-conditioned (cond = {condition:.3e})")
            }
            CavityError::MalformedNetwork(msg) => write!(f, "malformed scattering network: {msg}"),
            CavityError::SchemeValidation(msg) => write!(f, "invalid scheme: {msg}"),
            CavityError::StencilFailure { parameter } => {
                write!(f, "finite-difference stencil failed when perturbing {parameter}")
            }
            CavityError::InvalidGrid(msg) => write!(f, "invalid time grid: {msg}"),
            CavityError::ResourceBound(msg) => write!(f, "resource bound exceeded: {msg}"),
            CavityError::Parse(msg) => write!(f, "parse error: {msg}"),
            CavityError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CavityError {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CavityError>;
