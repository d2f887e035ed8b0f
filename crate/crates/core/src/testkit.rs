//! Shared fixtures for unit tests.

use num_complex::Complex64;

use crate::model::{CavityCoefficients, RadiativePort};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Hand-built coefficients of the no-feedback scheme at gamma = 2,
/// theta1 = pi/3, theta2 = pi/6, all phases zero. Noise dimension 2.
pub(crate) fn no_feedback_example() -> CavityCoefficients {
    let root2 = 2.0f64.sqrt();
    let root3_half = 3.0f64.sqrt() / 2.0;
    let port = RadiativePort::new(
        c(0.5 * root2, 0.0),
        c(root3_half * root2, 0.0),
        c(-0.5 * root3_half, 0.0),
        vec![c(-0.75, 0.0), c(0.5, 0.0)],
    );
    CavityCoefficients::new(
        2.0,
        5.0,
        vec![port],
        vec![c(root3_half * root2, 0.0), c(0.0, 0.0)],
    )
    .unwrap()
}

/// Symmetric-loss complete-scheme model: theta1 = theta2 = pi/4, theta3 = 0,
/// gamma = 1, no absorption. Noise dimension 3.
pub(crate) fn symmetric_loss_model() -> CavityCoefficients {
    let s = 0.5f64.sqrt();
    let port = RadiativePort::new(
        c(s, 0.0),
        c(s, 0.0),
        c(-0.5, 0.0),
        vec![c(-0.5, 0.0), c(s, 0.0), c(0.0, 0.0)],
    );
    CavityCoefficients::new(
        1.0,
        0.0,
        vec![port],
        vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
    )
    .unwrap()
}
