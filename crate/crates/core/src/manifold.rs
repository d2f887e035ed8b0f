//! Completeness analysis of scheme parametrizations by numerical Jacobian
//! rank.
//!
//! Each scheme family is a map from real parameters to the twelve
//! gauge-invariant real coordinates of a one-sided coefficient set. A family
//! is complete when the rank of that map at generic points equals the
//! dimension of the constraint manifold it targets; degenerate families reach
//! only a lower-dimensional submanifold and show a correspondingly lower rank.
//! Ranks are computed by central finite differences and singular-value
//! counting over seeded sample points, so verdicts are reproducible
//! regression values.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CavityError, Result};
use crate::model::CavityCoefficients;
use crate::sampling::SampleBox;
use crate::scheme::{
    compose_complete, compose_no_feedback, compose_no_mirror_loss, BeamSplitterParams,
    CompleteScheme, NoFeedbackScheme, NoMirrorLossScheme,
};

/// Point in the real parameter space of a scheme family, in the family's
/// declared parameter order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPoint {
    pub values: Vec<f64>,
}

/// Gauge-invariant real coordinates of a one-sided coefficient set:
/// `(Gamma, omega, Re/Im t_c, Re/Im t_o, Re/Im r_o, ||noise_cav||^2,
/// ||noise_out||^2, Re/Im xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientEmbedding {
    pub values: [f64; 12],
}

pub const EMBEDDING_DIM: usize = 12;

/// Embeds a one-port model into the twelve invariant coordinates.
///
/// Invariant under any unitary rotation of the noise basis.
pub fn embed_coefficients(c: &CavityCoefficients) -> Result<CoefficientEmbedding> {
    if c.port_count() != 1 {
        return Err(CavityError::PortCount {
            expected: 1,
            got: c.port_count(),
        });
    }
    let p = &c.ports()[0];
    let xi = c.xi(0);
    Ok(CoefficientEmbedding {
        values: [
            c.gamma(),
            c.omega(),
            p.t_c.re,
            p.t_c.im,
            p.t_o.re,
            p.t_o.im,
            p.r_o.re,
            p.r_o.im,
            c.noise_cav_norm_sqr(),
            p.noise_out_norm_sqr(),
            xi.re,
            xi.im,
        ],
    })
}

/// Coefficient-manifold classes with a derived real dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelClass {
    IdealOneSided,
    NoisyOneSided,
    NoFeedbackSub,
    NoMirrorLossSub,
}

impl FromStr for ModelClass {
    type Err = CavityError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal_one_sided" => Ok(ModelClass::IdealOneSided),
            "noisy_one_sided" => Ok(ModelClass::NoisyOneSided),
            "no_feedback_sub" => Ok(ModelClass::NoFeedbackSub),
            "no_mirror_loss_sub" => Ok(ModelClass::NoMirrorLossSub),
            other => Err(CavityError::Parse(format!("unknown model class '{other}'"))),
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModelClass::IdealOneSided => "ideal_one_sided",
            ModelClass::NoisyOneSided => "noisy_one_sided",
            ModelClass::NoFeedbackSub => "no_feedback_sub",
            ModelClass::NoMirrorLossSub => "no_mirror_loss_sub",
        };
        f.write_str(name)
    }
}

/// Real dimension of a coefficient-manifold class: free real coordinates
/// minus independent real constraints.
///
/// - ideal one-sided: 8 coordinates, 4 real constraints -> 4;
/// - noisy one-sided: 12 coordinates, 4 real constraints -> 8;
/// - no-feedback submanifold: the extra complex certificate removes 2 -> 6;
/// - no-mirror-loss submanifold: the output-noise coordinates vanish
///   identically (9 live coordinates), 4 constraints -> 5.
pub fn manifold_dimension(class: ModelClass) -> usize {
    match class {
        ModelClass::IdealOneSided => 4,
        ModelClass::NoisyOneSided => 8,
        ModelClass::NoFeedbackSub => 6,
        ModelClass::NoMirrorLossSub => 5,
    }
}

/// One-sided scheme families under rank analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeFamily {
    Complete,
    NoFeedback,
    NoMirrorLoss,
}

impl FromStr for SchemeFamily {
    type Err = CavityError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(SchemeFamily::Complete),
            "no_feedback" => Ok(SchemeFamily::NoFeedback),
            "no_mirror_loss" => Ok(SchemeFamily::NoMirrorLoss),
            other => Err(CavityError::Parse(format!("unknown scheme family '{other}'"))),
        }
    }
}

impl fmt::Display for SchemeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SchemeFamily::Complete => "complete",
            SchemeFamily::NoFeedback => "no_feedback",
            SchemeFamily::NoMirrorLoss => "no_mirror_loss",
        };
        f.write_str(name)
    }
}

impl SchemeFamily {
    /// Declared parameter order of the family.
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            SchemeFamily::Complete => &[
                "theta1", "mu1", "nu1", "theta2", "mu2", "nu2", "theta3", "mu3", "nu3", "phi3",
                "omega0", "gamma", "absorb_rate",
            ],
            SchemeFamily::NoFeedback => {
                &["theta1", "mu1", "nu1", "theta2", "mu2", "nu2", "omega0", "gamma"]
            }
            SchemeFamily::NoMirrorLoss => {
                &["theta3", "mu3", "nu3", "phi3", "omega0", "gamma", "absorb_rate"]
            }
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_names().len()
    }

    /// The manifold class this family parametrizes.
    pub fn own_class(&self) -> ModelClass {
        match self {
            SchemeFamily::Complete => ModelClass::NoisyOneSided,
            SchemeFamily::NoFeedback => ModelClass::NoFeedbackSub,
            SchemeFamily::NoMirrorLoss => ModelClass::NoMirrorLossSub,
        }
    }

    /// Composes the family at a parameter point.
    pub fn compose(&self, p: &ParameterPoint) -> Result<CavityCoefficients> {
        let v = &p.values;
        let expected = self.parameter_count();
        if v.len() != expected {
            return Err(CavityError::DimensionMismatch {
                what: "parameter point",
                expected,
                got: v.len(),
            });
        }
        match self {
            SchemeFamily::Complete => compose_complete(&CompleteScheme {
                bs1: BeamSplitterParams::symmetric(v[0], v[1], v[2]),
                bs2: BeamSplitterParams::symmetric(v[3], v[4], v[5]),
                bs3: BeamSplitterParams::asymmetric(v[6], v[7], v[8], v[9]),
                omega0: v[10],
                gamma: v[11],
                absorb_rate: v[12],
            }),
            SchemeFamily::NoFeedback => compose_no_feedback(&NoFeedbackScheme {
                bs1: BeamSplitterParams::symmetric(v[0], v[1], v[2]),
                bs2: BeamSplitterParams::symmetric(v[3], v[4], v[5]),
                omega0: v[6],
                gamma: v[7],
            }),
            SchemeFamily::NoMirrorLoss => compose_no_mirror_loss(&NoMirrorLossScheme {
                bs3: BeamSplitterParams::asymmetric(v[0], v[1], v[2], v[3]),
                omega0: v[4],
                gamma: v[5],
                absorb_rate: v[6],
            }),
        }
    }

    /// Draws a parameter point uniformly in the box, one value per declared
    /// parameter name.
    pub fn draw(&self, bx: &SampleBox, rng: &mut impl rand::Rng) -> ParameterPoint {
        let values = self
            .parameter_names()
            .iter()
            .map(|name| {
                let range = if name.starts_with("theta") {
                    bx.theta
                } else if *name == "omega0" {
                    bx.omega0
                } else if *name == "gamma" {
                    bx.gamma
                } else if *name == "absorb_rate" {
                    bx.absorb
                } else {
                    bx.phase
                };
                rng.gen_range(range.0..range.1)
            })
            .collect();
        ParameterPoint { values }
    }
}

/// Central-difference Jacobian of `embed_coefficients` composed with the
/// family map: one column per parameter, `EMBEDDING_DIM` rows.
pub fn jacobian(family: SchemeFamily, p: &ParameterPoint, step: f64) -> Result<DMatrix<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(CavityError::InvalidRate {
            what: "fd step",
            value: step,
        });
    }
    let n = family.parameter_count();
    if p.values.len() != n {
        return Err(CavityError::DimensionMismatch {
            what: "parameter point",
            expected: n,
            got: p.values.len(),
        });
    }
    let mut jac = DMatrix::<f64>::zeros(EMBEDDING_DIM, n);
    let mut probe = p.clone();
    for col in 0..n {
        let base = p.values[col];
        let eval = |point: &ParameterPoint| -> Result<CoefficientEmbedding> {
            let model = family
                .compose(point)
                .map_err(|_| CavityError::StencilFailure {
                    parameter: family.parameter_names()[col].to_string(),
                })?;
            embed_coefficients(&model)
        };
        probe.values[col] = base + step;
        let plus = eval(&probe)?;
        probe.values[col] = base - step;
        let minus = eval(&probe)?;
        probe.values[col] = base;
        let inv = 0.5 / step;
        for row in 0..EMBEDDING_DIM {
            jac[(row, col)] = (plus.values[row] - minus.values[row]) * inv;
        }
    }
    Ok(jac)
}

/// Numerical rank: singular values above `rel_tol` times the largest.
/// Returns the rank and the singular values in descending order.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> (usize, Vec<f64>) {
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let max = sv.first().cloned().unwrap_or(0.0);
    if max <= 0.0 {
        return (0, sv);
    }
    let rank = sv.iter().filter(|s| **s > rel_tol * max).count();
    (rank, sv)
}

/// Outcome of a seeded rank sweep over one scheme family.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVerdict {
    pub family: SchemeFamily,
    pub target: ModelClass,
    /// Most frequent Jacobian rank across the sample points.
    pub modal_rank: usize,
    /// Expected rank: the dimension of the target manifold class.
    pub expected: usize,
    /// True iff the modal rank equals `expected` at >= 99% of samples.
    pub complete: bool,
    /// Fraction of samples attaining the modal rank.
    pub modal_fraction: f64,
    pub samples_tested: usize,
    pub seed: u64,
    /// Singular values at the first sample attaining the modal rank.
    pub singular_values: Vec<f64>,
    /// Smallest ratio sigma_rank / sigma_{rank+1} over modal-rank samples;
    /// `None` when no further singular value exists.
    pub min_gap: Option<f64>,
}

/// Fraction of modal-rank samples required for a `complete` verdict.
pub const MODAL_FRACTION_REQUIRED: f64 = 0.99;

/// Samples the family's admissible box, computes the Jacobian rank at every
/// point, and reports the modal rank against the target class dimension.
///
/// Deterministic for fixed `(family, target, n_samples, seed, step, rel_tol)`.
pub fn completeness_check(
    family: SchemeFamily,
    target: ModelClass,
    n_samples: usize,
    seed: u64,
    step: f64,
    rel_tol: f64,
) -> Result<RankVerdict> {
    if n_samples == 0 {
        return Err(CavityError::ResourceBound(
            "completeness check needs at least one sample".into(),
        ));
    }
    let bx = SampleBox::rank_analysis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks: Vec<usize> = Vec::with_capacity(n_samples);
    let mut spectra: Vec<Vec<f64>> = Vec::with_capacity(n_samples);
    let mut failures = 0usize;
    for _ in 0..n_samples {
        let point = family.draw(&bx, &mut rng);
        match jacobian(family, &point, step) {
            Ok(jac) => {
                let (rank, sv) = numerical_rank(&jac, rel_tol);
                ranks.push(rank);
                spectra.push(sv);
            }
            Err(CavityError::StencilFailure { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if ranks.is_empty() {
        return Err(CavityError::ResourceBound(format!(
            "all {failures} samples failed stencil evaluation"
        )));
    }

    let max_rank = *ranks.iter().max().unwrap();
    let mut counts = vec![0usize; max_rank + 1];
    for r in &ranks {
        counts[*r] += 1;
    }
    let modal_rank = counts
        .iter()
        .enumerate()
        .max_by_key(|(_, c)| **c)
        .map(|(r, _)| r)
        .unwrap();
    let modal_count = counts[modal_rank];
    let modal_fraction = modal_count as f64 / ranks.len() as f64;

    let representative = ranks
        .iter()
        .position(|r| *r == modal_rank)
        .expect("modal rank attained");
    let singular_values = spectra[representative].clone();

    let min_gap = ranks
        .iter()
        .zip(&spectra)
        .filter(|(r, _)| **r == modal_rank)
        .filter_map(|(_, sv)| {
            if modal_rank == 0 || modal_rank >= sv.len() {
                None
            } else if sv[modal_rank] > 0.0 {
                Some(sv[modal_rank - 1] / sv[modal_rank])
            } else {
                Some(f64::INFINITY)
            }
        })
        .fold(None, |acc: Option<f64>, g| {
            Some(acc.map_or(g, |a| a.min(g)))
        });

    let expected = manifold_dimension(target);
    Ok(RankVerdict {
        family,
        target,
        modal_rank,
        expected,
        complete: modal_rank == expected && modal_fraction >= MODAL_FRACTION_REQUIRED,
        modal_fraction,
        samples_tested: ranks.len(),
        seed,
        singular_values,
        min_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rotate_basis;
    use crate::model::ideal_cavity;
    use crate::sampling::random_unitary;
    use crate::tol;

    #[test]
    fn embedding_of_ideal_cavity() {
        let e = embed_coefficients(&ideal_cavity(1.0, 0.0, 0)).unwrap();
        assert_eq!(
            e.values,
            [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn embedding_of_symmetric_loss_example() {
        let e = embed_coefficients(&crate::testkit::symmetric_loss_model()).unwrap();
        let s = 0.5f64.sqrt();
        let expected = [1.0, 0.0, s, 0.0, s, 0.0, -0.5, 0.0, 0.5, 0.75, -0.5 * s, 0.0];
        for (a, b) in e.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn embedding_is_gauge_invariant() {
        use rand::SeedableRng;
        let m = crate::testkit::symmetric_loss_model();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(3, &mut rng);
        let rotated = rotate_basis(&m, &u).unwrap();
        let e0 = embed_coefficients(&m).unwrap();
        let e1 = embed_coefficients(&rotated).unwrap();
        for (a, b) in e0.values.iter().zip(e1.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_rejects_two_port_models() {
        use crate::scheme::{compose_two_sided, BeamSplitterParams, TwoSidedScheme};
        let m = compose_two_sided(&TwoSidedScheme {
            gamma_right: 1.0,
            gamma_left: 1.0,
            omega0: 0.0,
            absorb_rate: 0.0,
            bs1: BeamSplitterParams::identity(),
            bs2: BeamSplitterParams::identity(),
            bs3: BeamSplitterParams::identity(),
            bs4: BeamSplitterParams::identity(),
            bs5: BeamSplitterParams::identity(),
            bs6: BeamSplitterParams::identity(),
        })
        .unwrap();
        assert!(matches!(
            embed_coefficients(&m),
            Err(CavityError::PortCount { .. })
        ));
    }

    #[test]
    fn manifold_dimensions() {
        assert_eq!(manifold_dimension(ModelClass::IdealOneSided), 4);
        assert_eq!(manifold_dimension(ModelClass::NoisyOneSided), 8);
        assert_eq!(manifold_dimension(ModelClass::NoFeedbackSub), 6);
        assert_eq!(manifold_dimension(ModelClass::NoMirrorLossSub), 5);
        assert_eq!(
            manifold_dimension(ModelClass::NoisyOneSided)
                - manifold_dimension(ModelClass::NoFeedbackSub),
            2
        );
        assert!("bogus".parse::<ModelClass>().is_err());
    }

    #[test]
    fn numerical_rank_examples() {
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(numerical_rank(&m, 1e-8).0, 1);
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        assert_eq!(numerical_rank(&m, 1e-8).0, 2);
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(numerical_rank(&z, 1e-8).0, 0);
    }

    #[test]
    fn trivial_jacobian_columns_are_exact() {
        // Gamma depends on gamma with unit slope and omega on omega0 with
        // unit slope in the no-feedback family.
        let family = SchemeFamily::NoFeedback;
        let p = ParameterPoint {
            values: vec![0.6, 0.2, -0.4, 0.9, 0.1, 0.3, 0.5, 1.2],
        };
        let jac = jacobian(family, &p, 1e-6).unwrap();
        let gamma_col = family.parameter_names().iter().position(|n| *n == "gamma").unwrap();
        let omega_col = family.parameter_names().iter().position(|n| *n == "omega0").unwrap();
        assert!((jac[(0, gamma_col)] - 1.0).abs() < 1e-9);
        assert!((jac[(1, omega_col)] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn feedback_phase_does_not_move_gamma() {
        // d Gamma / d phi3 vanishes in the complete family.
        let family = SchemeFamily::Complete;
        let p = ParameterPoint {
            values: vec![0.5, 0.3, -0.2, 0.7, 0.4, 0.1, 0.6, -0.3, 0.2, 0.8, 0.1, 1.3, 0.4],
        };
        let jac = jacobian(family, &p, 1e-6).unwrap();
        let phi_col = family.parameter_names().iter().position(|n| *n == "phi3").unwrap();
        assert!(jac[(0, phi_col)].abs() < 1e-9);
    }

    #[test]
    fn stencil_failure_names_a_parameter() {
        // theta3 = pi/2 with transparent mirror splitters puts the feedback
        // loop at self-oscillation, so stencil evaluation fails.
        let p = ParameterPoint {
            values: vec![
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                std::f64::consts::FRAC_PI_2,
                0.0,
                0.0,
                0.0,
                0.0,
                1.0,
                0.0,
            ],
        };
        match jacobian(SchemeFamily::Complete, &p, 1e-6) {
            Err(CavityError::StencilFailure { parameter }) => {
                assert!(!parameter.is_empty());
            }
            other => panic!("expected stencil failure, got {other:?}"),
        }
    }

    #[test]
    fn jacobian_richardson_consistency() {
        use rand::SeedableRng;
        let family = SchemeFamily::Complete;
        let bx = SampleBox::rank_analysis();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let p = family.draw(&bx, &mut rng);
        let j1 = jacobian(family, &p, 1e-4).unwrap();
        let j2 = jacobian(family, &p, 5e-5).unwrap();
        // Central differences converge at second order: the step-halved
        // Jacobian should agree to roughly (step)^2 times curvature.
        let diff = (&j1 - &j2).amax();
        assert!(diff < 1e-6, "diff = {diff}");
    }

    #[test]
    fn completeness_modal_ranks_are_pinned() {
        let complete = completeness_check(
            SchemeFamily::Complete,
            ModelClass::NoisyOneSided,
            40,
            42,
            tol::DEFAULT_FD_STEP,
            tol::DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert_eq!(complete.modal_rank, 8);
        assert!(complete.complete, "fraction {}", complete.modal_fraction);

        let nf = completeness_check(
            SchemeFamily::NoFeedback,
            ModelClass::NoFeedbackSub,
            40,
            42,
            tol::DEFAULT_FD_STEP,
            tol::DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert_eq!(nf.modal_rank, 6);
        assert!(nf.complete);
        // Against the full manifold the family is degenerate.
        let nf_full = completeness_check(
            SchemeFamily::NoFeedback,
            ModelClass::NoisyOneSided,
            40,
            42,
            tol::DEFAULT_FD_STEP,
            tol::DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert!(!nf_full.complete);
        assert_eq!(nf_full.expected, 8);

        let nml = completeness_check(
            SchemeFamily::NoMirrorLoss,
            ModelClass::NoMirrorLossSub,
            40,
            42,
            tol::DEFAULT_FD_STEP,
            tol::DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert_eq!(nml.modal_rank, 5);
        assert!(nml.complete);
    }

    #[test]
    fn reseeding_preserves_modal_rank() {
        for seed in [42u64, 1234] {
            let v = completeness_check(
                SchemeFamily::Complete,
                ModelClass::NoisyOneSided,
                30,
                seed,
                tol::DEFAULT_FD_STEP,
                tol::DEFAULT_RANK_TOL,
            )
            .unwrap();
            assert_eq!(v.modal_rank, 8, "seed {seed}");
        }
    }

    #[test]
    fn completeness_check_is_reproducible() {
        let a = completeness_check(
            SchemeFamily::Complete,
            ModelClass::NoisyOneSided,
            10,
            7,
            1e-6,
            1e-8,
        )
        .unwrap();
        let b = completeness_check(
            SchemeFamily::Complete,
            ModelClass::NoisyOneSided,
            10,
            7,
            1e-6,
            1e-8,
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
