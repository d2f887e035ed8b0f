//! Cavity-coefficient data model and constraint verification.
//!
//! A realistic cavity is described at the c-number level by its total decay
//! rate, resonance frequency, per-port transmission/reflection coefficients,
//! and the expansion coefficients of the two unwanted-noise operators in a
//! shared orthonormal noise basis. Preservation of bosonic commutators pins
//! these coefficients to a manifold cut out by one decay-rate equality, one
//! unitarity equality per port, and one complex cross equality per port;
//! one-sided models are additionally restricted by four inequalities.
//!
//! Unphysical coefficient sets are representable on purpose: physicality is a
//! verdict returned by [`constraint_residuals`] / [`is_physical`], never a type
//! invariant, so off-manifold points can be probed by the analysis modules.

use num_complex::Complex64;

use crate::error::{CavityError, Result};
use crate::tol;

/// One radiative input-output channel of a cavity.
///
/// `t_c` injects the port's input field into the cavity mode (units
/// sqrt(1/time)), `t_o` extracts the cavity mode into the port's output
/// (units sqrt(1/time)), `r_o` is the dimensionless prompt reflection, and
/// `noise_out` holds the dimensionless expansion coefficients of the port's
/// output-noise operator in the model's shared noise basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiativePort {
    pub t_c: Complex64,
    pub t_o: Complex64,
    pub r_o: Complex64,
    pub noise_out: Vec<Complex64>,
}

impl RadiativePort {
    pub fn new(t_c: Complex64, t_o: Complex64, r_o: Complex64, noise_out: Vec<Complex64>) -> Self {
        Self {
            t_c,
            t_o,
            r_o,
            noise_out,
        }
    }

    /// Squared norm of the output-noise vector.
    pub fn noise_out_norm_sqr(&self) -> f64 {
        self.noise_out.iter().map(Complex64::norm_sqr).sum()
    }
}

/// Full c-number description of a cavity with unwanted noise.
///
/// `noise_cav` holds the Langevin-noise expansion coefficients (units
/// sqrt(1/time)) in the same basis as every port's `noise_out`; its length is
/// the model's noise dimension. Values are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityCoefficients {
    gamma: f64,
    omega: f64,
    ports: Vec<RadiativePort>,
    noise_cav: Vec<Complex64>,
}

impl CavityCoefficients {
    /// Validates dimensions and finiteness; does not require the constraints
    /// to hold.
    pub fn new(
        gamma: f64,
        omega: f64,
        ports: Vec<RadiativePort>,
        noise_cav: Vec<Complex64>,
    ) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(CavityError::InvalidRate {
                what: "gamma",
                value: gamma,
            });
        }
        if !omega.is_finite() {
            return Err(CavityError::NonFinite { what: "omega" });
        }
        if ports.is_empty() {
            return Err(CavityError::PortCount {
                expected: 1,
                got: 0,
            });
        }
        let dim = noise_cav.len();
        if noise_cav.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CavityError::NonFinite { what: "noise_cav" });
        }
        for port in &ports {
            for (z, what) in [
                (port.t_c, "t_c"),
                (port.t_o, "t_o"),
                (port.r_o, "r_o"),
            ] {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(CavityError::NonFinite { what });
                }
            }
            if port.noise_out.len() != dim {
                return Err(CavityError::DimensionMismatch {
                    what: "noise_out",
                    expected: dim,
                    got: port.noise_out.len(),
                });
            }
            if port
                .noise_out
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
            {
                return Err(CavityError::NonFinite { what: "noise_out" });
            }
        }
        Ok(Self {
            gamma,
            omega,
            ports,
            noise_cav,
        })
    }

    /// Total decay rate.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Resonance frequency.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn ports(&self) -> &[RadiativePort] {
        &self.ports
    }

    pub fn port_count(&self) -> usize {
        self.ports.len()
    }

    /// Langevin-noise expansion coefficients.
    pub fn noise_cav(&self) -> &[Complex64] {
        &self.noise_cav
    }

    /// Dimension of the shared noise basis.
    pub fn noise_dim(&self) -> usize {
        self.noise_cav.len()
    }

    /// Squared norm of the Langevin noise vector.
    pub fn noise_cav_norm_sqr(&self) -> f64 {
        self.noise_cav.iter().map(Complex64::norm_sqr).sum()
    }

    /// Cross coefficient of port `p`: sum_k noise_cav[k] * conj(noise_out[k]).
    ///
    /// This is the commutator pairing between the Langevin noise operator and
    /// the port's output-noise operator; like the norms it is invariant under
    /// simultaneous unitary rotations of the noise basis.
    pub fn xi(&self, port: usize) -> Complex64 {
        self.noise_cav
            .iter()
            .zip(&self.ports[port].noise_out)
            .map(|(c, o)| c * o.conj())
            .sum()
    }

    /// All noise vectors of the model, Langevin vector first, then one output
    /// vector per port in port order.
    pub fn noise_vectors(&self) -> Vec<&[Complex64]> {
        let mut vs: Vec<&[Complex64]> = Vec::with_capacity(1 + self.ports.len());
        vs.push(&self.noise_cav);
        for port in &self.ports {
            vs.push(&port.noise_out);
        }
        vs
    }

    /// Rebuilds the model with new noise vectors (same port scalars).
    /// Used by basis-changing operations.
    pub(crate) fn with_noise_vectors(
        &self,
        noise_cav: Vec<Complex64>,
        noise_out: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let ports = self
            .ports
            .iter()
            .zip(noise_out)
            .map(|(p, n)| RadiativePort::new(p.t_c, p.t_o, p.r_o, n))
            .collect();
        Self::new(self.gamma, self.omega, ports, noise_cav)
    }
}

/// Residuals of the equality constraints and slacks of the inequalities that
/// define the physical manifold, with a verdict at the stated tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    /// Decay-rate equality: gamma minus (noise-cavity norm squared plus the
    /// sum of |t_c|^2 over ports). Linear in gamma.
    pub decay_residual: f64,
    /// Per port: |r_o|^2 + ||noise_out||^2 - 1.
    pub unitarity_residuals: Vec<f64>,
    /// Per port: t_o + conj(t_c) * r_o + conj(xi).
    ///
    /// The conjugated cross coefficient is the orientation under which the
    /// output field of a constraint-satisfying model is delta-correlated; see
    /// `dynamics::output_commutator_kernel` and the discretized oracle tests.
    pub cross_residuals: Vec<Complex64>,
    /// One-sided inequality slacks, `None` for multi-port models.
    pub inequality_slacks: Option<[f64; 4]>,
    /// Tolerance the verdict was evaluated at.
    pub tol: f64,
    /// True iff every |residual| <= tol and every slack >= -tol.
    pub passed: bool,
}

impl ConstraintReport {
    /// Largest equality-residual magnitude in the report.
    pub fn max_residual(&self) -> f64 {
        let mut m = self.decay_residual.abs();
        for r in &self.unitarity_residuals {
            m = m.max(r.abs());
        }
        for c in &self.cross_residuals {
            m = m.max(c.norm());
        }
        m
    }

    /// Smallest inequality slack, or `None` for multi-port models.
    pub fn min_slack(&self) -> Option<f64> {
        self.inequality_slacks
            .map(|s| s.iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

/// Evaluates all equality residuals (and, for one-port models, the inequality
/// slacks) and renders a pass/fail verdict at `tolerance`.
pub fn constraint_residuals(c: &CavityCoefficients, tolerance: f64) -> ConstraintReport {
    let sum_tc: f64 = c.ports.iter().map(|p| p.t_c.norm_sqr()).sum();
    let decay_residual = c.gamma - (c.noise_cav_norm_sqr() + sum_tc);

    let unitarity_residuals: Vec<f64> = c
        .ports
        .iter()
        .map(|p| p.r_o.norm_sqr() + p.noise_out_norm_sqr() - 1.0)
        .collect();

    let cross_residuals: Vec<Complex64> = c
        .ports
        .iter()
        .enumerate()
        .map(|(i, p)| p.t_o + p.t_c.conj() * p.r_o + c.xi(i).conj())
        .collect();

    let inequality_slacks = if c.ports.len() == 1 {
        Some(one_sided_slacks(c))
    } else {
        None
    };

    let mut passed = decay_residual.abs() <= tolerance;
    passed &= unitarity_residuals.iter().all(|r| r.abs() <= tolerance);
    passed &= cross_residuals.iter().all(|r| r.norm() <= tolerance);
    if let Some(slacks) = inequality_slacks {
        passed &= slacks.iter().all(|s| *s >= -tolerance);
    }

    ConstraintReport {
        decay_residual,
        unitarity_residuals,
        cross_residuals,
        inequality_slacks,
        tol: tolerance,
        passed,
    }
}

fn one_sided_slacks(c: &CavityCoefficients) -> [f64; 4] {
    let p = &c.ports[0];
    let tc2 = p.t_c.norm_sqr();
    let to2 = p.t_o.norm_sqr();
    let ro2 = p.r_o.norm_sqr();
    let cross = p.t_o + p.t_c.conj() * p.r_o;
    // The fourth slack is the Cauchy-Schwarz bound on the cross coefficient,
    // |xi|^2 <= ||noise_cav||^2 ||noise_out||^2, rewritten through the three
    // equality constraints so it only involves the port scalars and gamma.
    let slack4 = (c.gamma - tc2) * (1.0 - ro2) - cross.norm_sqr();
    [c.gamma - tc2, c.gamma - to2, 1.0 - ro2, slack4]
}

/// Inequality slacks for a one-sided model. All four must be nonnegative for
/// the scalar parameters to be physically consistent.
pub fn inequality_slacks(c: &CavityCoefficients) -> Result<[f64; 4]> {
    if c.ports.len() != 1 {
        return Err(CavityError::PortCount {
            expected: 1,
            got: c.ports.len(),
        });
    }
    Ok(one_sided_slacks(c))
}

/// Reflection coefficient of an idealized (noise-free) cavity, `-t_o / conj(t_c)`.
pub fn ideal_reflection(t_o: Complex64, t_c: Complex64) -> Result<Complex64> {
    if t_c.norm_sqr() == 0.0 {
        return Err(CavityError::ZeroDivisor { what: "t_c" });
    }
    Ok(-t_o / t_c.conj())
}

/// True iff every residual is within `tolerance` and every slack is above
/// `-tolerance`.
pub fn is_physical(c: &CavityCoefficients, tolerance: f64) -> bool {
    constraint_residuals(c, tolerance).passed
}

/// Idealized lossless one-sided cavity with decay rate `gamma` and `noise_dim`
/// zero-padded noise slots.
pub fn ideal_cavity(gamma: f64, omega: f64, noise_dim: usize) -> CavityCoefficients {
    let root = Complex64::from(gamma.sqrt());
    let port = RadiativePort::new(
        root,
        root,
        Complex64::from(-1.0),
        vec![Complex64::from(0.0); noise_dim],
    );
    CavityCoefficients::new(gamma, omega, vec![port], vec![Complex64::from(0.0); noise_dim])
        .expect("ideal cavity parameters are always valid")
}

/// Convenience verdict at the crate default tolerance.
pub fn is_physical_default(c: &CavityCoefficients) -> bool {
    is_physical(c, tol::DEFAULT_VERIFY_TOL)
}
