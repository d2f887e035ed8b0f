//! Seeded random draws of scheme parameters and unitary matrices.
//!
//! Two admissible boxes are used throughout the crate: a wide `sweep` box for
//! physicality sweeps over composer outputs, and a narrower `rank_analysis`
//! box that keeps Jacobian sample points away from boundary-degenerate
//! parameter values. Mixing angles stay clear of 0 and pi/2 in both; the
//! feedback-splitter draw additionally enforces the loop-denominator guard
//! (redundant inside these boxes, kept as a hard backstop). All draws are
//! deterministic functions of the RNG stream.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::scheme::{
    BeamSplitterParams, CompleteScheme, NoFeedbackScheme, NoMirrorLossScheme, TwoSidedScheme,
};

/// Ranges for one-sided scheme parameter draws.
#[derive(Debug, Clone, Copy)]
pub struct SampleBox {
    pub theta: (f64, f64),
    pub phase: (f64, f64),
    pub gamma: (f64, f64),
    pub absorb: (f64, f64),
    pub omega0: (f64, f64),
    /// Lower bound on the feedback loop denominator magnitude.
    pub loop_guard: f64,
}

impl SampleBox {
    /// Wide box for composer physicality sweeps.
    pub fn sweep() -> Self {
        let pi = std::f64::consts::PI;
        Self {
            theta: (0.1, std::f64::consts::FRAC_PI_2 - 0.1),
            phase: (-pi, pi),
            gamma: (0.1, 10.0),
            absorb: (0.0, 5.0),
            omega0: (-5.0, 5.0),
            loop_guard: 1e-6,
        }
    }

    /// Interior box for Jacobian rank analysis.
    pub fn rank_analysis() -> Self {
        let pi = std::f64::consts::PI;
        Self {
            theta: (0.1, std::f64::consts::FRAC_PI_2 - 0.1),
            phase: (-pi + 0.1, pi - 0.1),
            gamma: (0.5, 2.0),
            absorb: (0.1, 2.0),
            omega0: (-1.0, 1.0),
            loop_guard: 1e-3,
        }
    }

    fn draw_theta(&self, rng: &mut impl Rng) -> f64 {
        rng.gen_range(self.theta.0..self.theta.1)
    }

    fn draw_phase(&self, rng: &mut impl Rng) -> f64 {
        rng.gen_range(self.phase.0..self.phase.1)
    }

    fn draw_symmetric(&self, rng: &mut impl Rng) -> BeamSplitterParams {
        BeamSplitterParams::symmetric(
            self.draw_theta(rng),
            self.draw_phase(rng),
            self.draw_phase(rng),
        )
    }

    fn draw_asymmetric(&self, rng: &mut impl Rng) -> BeamSplitterParams {
        BeamSplitterParams::asymmetric(
            self.draw_theta(rng),
            self.draw_phase(rng),
            self.draw_phase(rng),
            self.draw_phase(rng),
        )
    }
}

/// Draws a complete-scheme parameter set, retrying (deterministically) until
/// the loop-denominator guard is met.
pub fn draw_complete(bx: &SampleBox, rng: &mut impl Rng) -> CompleteScheme {
    loop {
        let s = CompleteScheme {
            gamma: rng.gen_range(bx.gamma.0..bx.gamma.1),
            omega0: rng.gen_range(bx.omega0.0..bx.omega0.1),
            absorb_rate: rng.gen_range(bx.absorb.0..bx.absorb.1),
            bs1: bx.draw_symmetric(rng),
            bs2: bx.draw_symmetric(rng),
            bs3: bx.draw_asymmetric(rng),
        };
        let denom = Complex64::from(1.0)
            - s.bs3.reflection().conj() * s.bs1.transmission() * s.bs2.transmission();
        if denom.norm() > bx.loop_guard {
            return s;
        }
    }
}

pub fn draw_no_mirror_loss(bx: &SampleBox, rng: &mut impl Rng) -> NoMirrorLossScheme {
    loop {
        let s = NoMirrorLossScheme {
            gamma: rng.gen_range(bx.gamma.0..bx.gamma.1),
            omega0: rng.gen_range(bx.omega0.0..bx.omega0.1),
            absorb_rate: rng.gen_range(bx.absorb.0..bx.absorb.1),
            bs3: bx.draw_asymmetric(rng),
        };
        let denom = Complex64::from(1.0) - s.bs3.reflection().conj();
        if denom.norm() > bx.loop_guard {
            return s;
        }
    }
}

pub fn draw_no_feedback(bx: &SampleBox, rng: &mut impl Rng) -> NoFeedbackScheme {
    NoFeedbackScheme {
        gamma: rng.gen_range(bx.gamma.0..bx.gamma.1),
        omega0: rng.gen_range(bx.omega0.0..bx.omega0.1),
        bs1: bx.draw_symmetric(rng),
        bs2: bx.draw_symmetric(rng),
    }
}

pub fn draw_two_sided(bx: &SampleBox, rng: &mut impl Rng) -> TwoSidedScheme {
    loop {
        let s = TwoSidedScheme {
            gamma_right: rng.gen_range(bx.gamma.0..bx.gamma.1),
            gamma_left: rng.gen_range(bx.gamma.0..bx.gamma.1),
            omega0: rng.gen_range(bx.omega0.0..bx.omega0.1),
            absorb_rate: rng.gen_range(bx.absorb.0..bx.absorb.1),
            bs1: bx.draw_symmetric(rng),
            bs2: bx.draw_symmetric(rng),
            bs3: bx.draw_symmetric(rng),
            bs4: bx.draw_symmetric(rng),
            bs5: bx.draw_asymmetric(rng),
            bs6: bx.draw_asymmetric(rng),
        };
        let denom_r = Complex64::from(1.0)
            - s.bs5.reflection().conj() * s.bs1.transmission() * s.bs2.transmission();
        let denom_l = Complex64::from(1.0)
            - s.bs6.reflection().conj() * s.bs3.transmission() * s.bs4.transmission();
        if denom_r.norm() > bx.loop_guard && denom_l.norm() > bx.loop_guard {
            return s;
        }
    }
}

/// Random unitary: QR factor of a dense random complex matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let m = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    m.qr().q()
}
