//! Replacement-scheme composition: beam-splitter parameters to effective
//! cavity coefficients.
//!
//! A lossy coupling mirror is replaced by an ideal mirror dressed with beam
//! splitters: one on the ingoing beam, one on the outgoing beam (each mixing
//! in a vacuum noise channel), and an asymmetric splitter that folds part of
//! the outgoing beam back onto the input, creating instantaneous (Markovian)
//! feedback. Eliminating the internal beams from the linear relations yields
//! closed forms for the effective decay rate, resonance shift, port
//! coefficients, and noise vectors. The same elimination is implemented
//! generically over an arbitrary unitary scattering network, which also covers
//! the two-sided scheme; the closed forms and the generic engine serve as
//! mutual oracles.
//!
//! Degenerate schemes (no mirror loss, no feedback) are obtained by deleting
//! elements; their outputs carry extra certificates: a unimodular prompt
//! reflection without mirror splitters, and `t_o * t_c / gamma + r_o = 0`
//! without feedback.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{CavityError, Result};
use crate::model::{CavityCoefficients, RadiativePort};
use crate::tol;

/// Beam-splitter parameters: transmission `cos(theta) e^{i mu}`, reflection
/// `sin(theta) e^{i nu}`, so |T|^2 + |R|^2 = 1 by construction. `phi` is the
/// extra output phase carried only by the asymmetric (feedback) splitters;
/// symmetric splitters keep it at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterParams {
    pub theta: f64,
    pub mu: f64,
    pub nu: f64,
    pub phi: f64,
}

impl BeamSplitterParams {
    /// Symmetric splitter (no output phase).
    pub fn symmetric(theta: f64, mu: f64, nu: f64) -> Self {
        Self {
            theta,
            mu,
            nu,
            phi: 0.0,
        }
    }

    /// Asymmetric splitter with output phase `phi`.
    pub fn asymmetric(theta: f64, mu: f64, nu: f64, phi: f64) -> Self {
        Self { theta, mu, nu, phi }
    }

    /// Identity splitter (full transmission, no phases).
    pub fn identity() -> Self {
        Self::symmetric(0.0, 0.0, 0.0)
    }

    pub fn transmission(&self) -> Complex64 {
        Complex64::from_polar(self.theta.cos(), self.mu)
    }

    pub fn reflection(&self) -> Complex64 {
        Complex64::from_polar(self.theta.sin(), self.nu)
    }

    fn validate(&self, name: &str) -> Result<()> {
        for v in [self.theta, self.mu, self.nu, self.phi] {
            if !v.is_finite() {
                return Err(CavityError::SchemeValidation(format!(
                    "non-finite parameter in splitter {name}"
                )));
            }
        }
        Ok(())
    }
}

/// 2x2 unitary of a beam splitter.
///
/// Rows map the inputs `(forward beam, auxiliary beam)` to the outputs
/// `(forward beam, auxiliary beam)`; the output phase multiplies the forward
/// output row only, which keeps the feedback path free of it:
///
/// ```text
/// [ e^{i phi} T   e^{i phi} R ]
/// [   -conj(R)      conj(T)  ]
/// ```
///
/// Unitary to machine precision for all parameter values.
pub fn bs_matrix(p: &BeamSplitterParams) -> Matrix2<Complex64> {
    let t = p.transmission();
    let r = p.reflection();
    let phase = Complex64::from_polar(1.0, p.phi);
    Matrix2::new(phase * t, phase * r, -r.conj(), t.conj())
}

/// Parameters of the complete one-sided replacement scheme.
///
/// `bs1` dresses the ingoing beam, `bs2` the outgoing beam, and the
/// asymmetric `bs3` implements the feedback; `gamma` and `absorb_rate` are
/// the radiative and absorption decay rates of the primary cavity, `omega0`
/// its bare resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct CompleteScheme {
    pub gamma: f64,
    pub omega0: f64,
    pub absorb_rate: f64,
    pub bs1: BeamSplitterParams,
    pub bs2: BeamSplitterParams,
    pub bs3: BeamSplitterParams,
}

/// Degenerate scheme without mirror splitters: the input enters the cavity
/// lossless, only the intracavity absorption channel and feedback remain.
#[derive(Debug, Clone, PartialEq)]
pub struct NoMirrorLossScheme {
    pub gamma: f64,
    pub omega0: f64,
    pub absorb_rate: f64,
    pub bs3: BeamSplitterParams,
}

/// Degenerate scheme without feedback or absorption channel: mirror splitters
/// only.
#[derive(Debug, Clone, PartialEq)]
pub struct NoFeedbackScheme {
    pub gamma: f64,
    pub omega0: f64,
    pub bs1: BeamSplitterParams,
    pub bs2: BeamSplitterParams,
}

/// Two-sided scheme: one mirror-splitter pair and one feedback splitter per
/// side. `bs1`, `bs2`, `bs5` dress the right port, `bs3`, `bs4`, `bs6` the
/// left port; the primary cavity has independent radiative couplings per side
/// plus one absorption channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedScheme {
    pub gamma_right: f64,
    pub gamma_left: f64,
    pub omega0: f64,
    pub absorb_rate: f64,
    pub bs1: BeamSplitterParams,
    pub bs2: BeamSplitterParams,
    pub bs3: BeamSplitterParams,
    pub bs4: BeamSplitterParams,
    pub bs5: BeamSplitterParams,
    pub bs6: BeamSplitterParams,
}

/// Replacement-scheme specification, one variant per scheme kind.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeSpec {
    Complete(CompleteScheme),
    NoMirrorLoss(NoMirrorLossScheme),
    NoFeedback(NoFeedbackScheme),
    TwoSided(TwoSidedScheme),
    Network(ScatteringNetwork),
}

impl SchemeSpec {
    /// Composes the effective cavity coefficients for any scheme kind.
    pub fn compose(&self) -> Result<CavityCoefficients> {
        match self {
            SchemeSpec::Complete(s) => compose_complete(s),
            SchemeSpec::NoMirrorLoss(s) => compose_no_mirror_loss(s),
            SchemeSpec::NoFeedback(s) => compose_no_feedback(s),
            SchemeSpec::TwoSided(s) => compose_two_sided(s),
            SchemeSpec::Network(n) => eliminate_network(n),
        }
    }
}

fn validate_rates(gamma: f64, what: &'static str, absorb_rate: f64) -> Result<()> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(CavityError::InvalidRate { what, value: gamma });
    }
    if !absorb_rate.is_finite() || absorb_rate < 0.0 {
        return Err(CavityError::InvalidRate {
            what: "absorb_rate",
            value: absorb_rate,
        });
    }
    Ok(())
}

/// Closed-form composition of the complete one-sided scheme.
///
/// The output has noise dimension 3 with slot order (mirror-in channel,
/// mirror-out channel, non-radiative channel) and satisfies all constraints
/// at the default tolerance.
pub fn compose_complete(s: &CompleteScheme) -> Result<CavityCoefficients> {
    validate_rates(s.gamma, "gamma", s.absorb_rate)?;
    if !s.omega0.is_finite() {
        return Err(CavityError::NonFinite { what: "omega0" });
    }
    s.bs1.validate("bs1")?;
    s.bs2.validate("bs2")?;
    s.bs3.validate("bs3")?;

    let t1 = s.bs1.transmission();
    let r1 = s.bs1.reflection();
    let t2 = s.bs2.transmission();
    let r2 = s.bs2.reflection();
    let t3 = s.bs3.transmission();
    let r3 = s.bs3.reflection();
    let phase3 = Complex64::from_polar(1.0, s.bs3.phi);

    // Feedback loop denominator; the coefficients diverge at the
    // self-oscillation point where it vanishes.
    let denom = Complex64::from(1.0) - r3.conj() * t1 * t2;
    if denom.norm() < tol::LOOP_DENOMINATOR_MIN {
        return Err(CavityError::NearSingularFeedback {
            denominator: denom.norm(),
        });
    }

    let root_gamma = Complex64::from(s.gamma.sqrt());
    let denom_sqr = denom.norm_sqr();
    let loop_gain = r3.conj() * t1 * t2;

    let gamma_eff = s.gamma * (1.0 - loop_gain.norm_sqr()) / denom_sqr + s.absorb_rate;
    let omega_eff = s.omega0 + s.gamma * (loop_gain / denom).im;

    let t_c = root_gamma * t1 * t3.conj() / denom;
    let a_c1 = root_gamma * r1 / denom;
    let a_c2 = -root_gamma * t1 * r2 * r3.conj() / denom;
    let t_o = root_gamma * phase3 * t2 * t3 / denom;
    let r_o = phase3 * (r3 - t1 * t2) / denom;
    let a_o1 = -phase3 * t2 * r1 * t3 / denom;
    let a_o2 = phase3 * r2 * t3 / denom;

    let zero = Complex64::from(0.0);
    let port = RadiativePort::new(t_c, t_o, r_o, vec![a_o1, a_o2, zero]);
    CavityCoefficients::new(
        gamma_eff,
        omega_eff,
        vec![port],
        vec![a_c1, a_c2, Complex64::from(s.absorb_rate.sqrt())],
    )
}

/// Composition with the mirror splitters removed (identity `bs1`, `bs2`).
///
/// The output has a vanishing output-noise vector, hence a unimodular prompt
/// reflection, and its noise is reducible to dimension one.
pub fn compose_no_mirror_loss(s: &NoMirrorLossScheme) -> Result<CavityCoefficients> {
    compose_complete(&CompleteScheme {
        gamma: s.gamma,
        omega0: s.omega0,
        absorb_rate: s.absorb_rate,
        bs1: BeamSplitterParams::identity(),
        bs2: BeamSplitterParams::identity(),
        bs3: s.bs3,
    })
}

/// Composition with the feedback splitter and the non-radiative channel
/// removed.
///
/// The output satisfies the additional certificate
/// `t_o * t_c / gamma + r_o = 0`, which complete-scheme outputs violate in
/// general.
pub fn compose_no_feedback(s: &NoFeedbackScheme) -> Result<CavityCoefficients> {
    validate_rates(s.gamma, "gamma", 0.0)?;
    if !s.omega0.is_finite() {
        return Err(CavityError::NonFinite { what: "omega0" });
    }
    s.bs1.validate("bs1")?;
    s.bs2.validate("bs2")?;

    let t1 = s.bs1.transmission();
    let r1 = s.bs1.reflection();
    let t2 = s.bs2.transmission();
    let r2 = s.bs2.reflection();
    let root_gamma = Complex64::from(s.gamma.sqrt());
    let zero = Complex64::from(0.0);

    let port = RadiativePort::new(
        root_gamma * t1,
        root_gamma * t2,
        -t1 * t2,
        vec![-r1 * t2, r2, zero],
    );
    CavityCoefficients::new(
        s.gamma,
        s.omega0,
        vec![port],
        vec![root_gamma * r1, zero, zero],
    )
}

/// Residual of the no-feedback certificate `t_o * t_c / gamma + r_o`.
pub fn no_feedback_certificate(c: &CavityCoefficients) -> Complex64 {
    let p = &c.ports()[0];
    p.t_o * p.t_c / Complex64::from(c.gamma()) + p.r_o
}

/// Unitary scattering network over labeled channel rails with instantaneous
/// propagation.
///
/// Rails are grouped as externals, cavity-facing, then noise. Column `j` of
/// `s_matrix` is input `j` in the order (external inputs, beams arriving from
/// the cavity, noise inputs); row `i` is output `i` in the order (beams
/// heading to the cavity, external outputs, noise outputs). Under this pairing
/// a lossless pass-through scheme is the identity matrix.
///
/// Each cavity-facing rail `j` couples to the cavity mode with strength
/// `sqrt(cavity_couplings[j])`; the ideal mirror behind it contributes the
/// prompt sign flip. The non-radiative absorption channel couples to the mode
/// directly and is not part of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringNetwork {
    pub s_matrix: DMatrix<Complex64>,
    pub n_external: usize,
    pub n_cavity: usize,
    pub n_noise: usize,
    pub cavity_couplings: Vec<f64>,
    pub omega0: f64,
    pub absorb_rate: f64,
}

impl ScatteringNetwork {
    pub fn new(
        s_matrix: DMatrix<Complex64>,
        n_external: usize,
        n_cavity: usize,
        n_noise: usize,
        cavity_couplings: Vec<f64>,
        omega0: f64,
        absorb_rate: f64,
    ) -> Result<Self> {
        let dim = n_external + n_cavity + n_noise;
        if s_matrix.nrows() != dim || s_matrix.ncols() != dim {
            return Err(CavityError::MalformedNetwork(format!(
                "s_matrix is {}x{}, partition declares {} channels",
                s_matrix.nrows(),
                s_matrix.ncols(),
                dim
            )));
        }
        if s_matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CavityError::NonFinite { what: "s_matrix" });
        }
        let deviation = crate::geometry::unitarity_deviation(&s_matrix);
        if deviation > tol::UNITARY_TOL {
            return Err(CavityError::NonUnitary { deviation });
        }
        if cavity_couplings.len() != n_cavity {
            return Err(CavityError::DimensionMismatch {
                what: "cavity_couplings",
                expected: n_cavity,
                got: cavity_couplings.len(),
            });
        }
        if cavity_couplings.iter().any(|g| !g.is_finite() || *g <= 0.0) {
            return Err(CavityError::InvalidRate {
                what: "cavity coupling",
                value: *cavity_couplings
                    .iter()
                    .find(|g| !g.is_finite() || **g <= 0.0)
                    .unwrap(),
            });
        }
        if !absorb_rate.is_finite() || absorb_rate < 0.0 {
            return Err(CavityError::InvalidRate {
                what: "absorb_rate",
                value: absorb_rate,
            });
        }
        if !omega0.is_finite() {
            return Err(CavityError::NonFinite { what: "omega0" });
        }
        Ok(Self {
            s_matrix,
            n_external,
            n_cavity,
            n_noise,
            cavity_couplings,
            omega0,
            absorb_rate,
        })
    }

    pub fn dim(&self) -> usize {
        self.n_external + self.n_cavity + self.n_noise
    }
}

/// Incremental builder that threads unit input rows through 2x2 components.
struct WireComposer {
    /// One row per live wire: coefficients over the network input channels.
    wires: Vec<Vec<Complex64>>,
}

impl WireComposer {
    fn new(n_inputs: usize) -> Self {
        let wires = (0..n_inputs)
            .map(|i| {
                let mut row = vec![Complex64::from(0.0); n_inputs];
                row[i] = Complex64::from(1.0);
                row
            })
            .collect();
        Self { wires }
    }

    /// Applies a beam splitter to wires `(a, b)` in place: the forward output
    /// replaces wire `a`, the auxiliary output replaces wire `b`.
    fn apply(&mut self, m: &Matrix2<Complex64>, a: usize, b: usize) {
        let n = self.wires[a].len();
        let mut out_a = vec![Complex64::from(0.0); n];
        let mut out_b = vec![Complex64::from(0.0); n];
        for k in 0..n {
            out_a[k] = m[(0, 0)] * self.wires[a][k] + m[(0, 1)] * self.wires[b][k];
            out_b[k] = m[(1, 0)] * self.wires[a][k] + m[(1, 1)] * self.wires[b][k];
        }
        self.wires[a] = out_a;
        self.wires[b] = out_b;
    }

    fn row(&self, wire: usize) -> &[Complex64] {
        &self.wires[wire]
    }
}

/// Assembles a scheme's beam splitters and wiring into one unitary scattering
/// network.
///
/// Supported kinds: complete, no-mirror-loss, no-feedback, two-sided, and
/// pass-through of an explicit network payload.
pub fn build_network(spec: &SchemeSpec) -> Result<ScatteringNetwork> {
    match spec {
        SchemeSpec::Complete(s) => {
            build_one_sided(s.gamma, s.omega0, s.absorb_rate, &s.bs1, &s.bs2, &s.bs3)
        }
        SchemeSpec::NoMirrorLoss(s) => build_one_sided(
            s.gamma,
            s.omega0,
            s.absorb_rate,
            &BeamSplitterParams::identity(),
            &BeamSplitterParams::identity(),
            &s.bs3,
        ),
        SchemeSpec::NoFeedback(s) => build_one_sided(
            s.gamma,
            s.omega0,
            0.0,
            &s.bs1,
            &s.bs2,
            &BeamSplitterParams::identity(),
        ),
        SchemeSpec::TwoSided(s) => build_two_sided(s),
        SchemeSpec::Network(n) => Ok(n.clone()),
    }
}

/// One-sided mirror block over the rails (external, cavity, noise1, noise2).
///
/// Input channels: (b_in, d_out, c1_in, c2_in); the splitters act in signal
/// order: bs2 on the beam leaving the cavity, bs3 folding it onto the input,
/// bs1 on the dressed beam entering the cavity.
fn build_one_sided(
    gamma: f64,
    omega0: f64,
    absorb_rate: f64,
    bs1: &BeamSplitterParams,
    bs2: &BeamSplitterParams,
    bs3: &BeamSplitterParams,
) -> Result<ScatteringNetwork> {
    validate_rates(gamma, "gamma", absorb_rate)?;
    bs1.validate("bs1")?;
    bs2.validate("bs2")?;
    bs3.validate("bs3")?;

    // Wire indices over inputs: 0 = external beam, 1 = cavity-side beam,
    // 2, 3 = noise beams. Wires are reused in place as signals propagate.
    let mut w = WireComposer::new(4);
    // Outgoing beam picks up noise channel 2: (d_out, c2) -> (v, c2_out).
    w.apply(&bs_matrix(bs2), 1, 3);
    // Feedback splitter mixes the outgoing beam with the external input:
    // (v, b_in) -> (b_out, w). Forward output is the external output.
    w.apply(&bs_matrix(bs3), 1, 0);
    // Ingoing beam picks up noise channel 1: (w, c1) -> (d_in, c1_out).
    w.apply(&bs_matrix(bs1), 0, 2);

    // Wires now hold: 0 = d_in (to cavity), 1 = b_out, 2 = c1_out, 3 = c2_out.
    let dim = 4;
    let mut s = DMatrix::<Complex64>::zeros(dim, dim);
    for (row, wire) in [(0, 0), (1, 1), (2, 2), (3, 3)] {
        for (col, value) in w.row(wire).iter().enumerate() {
            s[(row, col)] = *value;
        }
    }
    // Columns are currently (b_in, d_out, c1, c2); reorder to the declared
    // input order (external, cavity, noise...) -- already in that order.
    ScatteringNetwork::new(s, 1, 1, 2, vec![gamma], omega0, absorb_rate)
}

fn build_two_sided(s: &TwoSidedScheme) -> Result<ScatteringNetwork> {
    if !s.gamma_right.is_finite() || s.gamma_right <= 0.0 {
        return Err(CavityError::InvalidRate {
            what: "gamma_right",
            value: s.gamma_right,
        });
    }
    validate_rates(s.gamma_left, "gamma_left", s.absorb_rate)?;
    for (bs, name) in [
        (&s.bs1, "bs1"),
        (&s.bs2, "bs2"),
        (&s.bs3, "bs3"),
        (&s.bs4, "bs4"),
        (&s.bs5, "bs5"),
        (&s.bs6, "bs6"),
    ] {
        bs.validate(name)?;
    }

    // Input channels: (b_R, b_L, d_out_R, d_out_L, c1, c2, c3, c4).
    let mut w = WireComposer::new(8);
    // Right mirror block: bs2 on the outgoing beam with c2, bs5 feedback,
    // bs1 on the ingoing beam with c1.
    w.apply(&bs_matrix(&s.bs2), 2, 5);
    w.apply(&bs_matrix(&s.bs5), 2, 0);
    w.apply(&bs_matrix(&s.bs1), 0, 4);
    // Left mirror block: bs4 outgoing with c4, bs6 feedback, bs3 ingoing
    // with c3.
    w.apply(&bs_matrix(&s.bs4), 3, 7);
    w.apply(&bs_matrix(&s.bs6), 3, 1);
    w.apply(&bs_matrix(&s.bs3), 1, 6);

    // Wires now hold: 0 = d_in_R, 1 = d_in_L, 2 = b_out_R, 3 = b_out_L,
    // 4..8 = noise outputs. Output row order: (to-cavity R, L; external R, L;
    // noise 1..4).
    let dim = 8;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for (row, wire) in [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (6, 6), (7, 7)] {
        for (col, value) in w.row(wire).iter().enumerate() {
            mat[(row, col)] = *value;
        }
    }
    ScatteringNetwork::new(
        mat,
        2,
        2,
        4,
        vec![s.gamma_right, s.gamma_left],
        s.omega0,
        s.absorb_rate,
    )
}

/// Eliminates the instantaneous feedback of a scattering network, returning
/// the effective cavity coefficients.
///
/// With `g` the beams entering the cavity mirrors, `f = k a - g` the beams
/// leaving them (`k` the vector of root couplings), and the network relation
/// `g = S_gf f + S_gb b + S_gn n`, solving `(I + S_gf) g = S_gf k a + ...`
/// expresses every internal beam in terms of the cavity mode, the external
/// inputs, and the noise inputs. The resulting model has one noise slot per
/// network noise rail plus a final slot for the non-radiative channel.
pub fn eliminate_network(n: &ScatteringNetwork) -> Result<CavityCoefficients> {
    let ne = n.n_external;
    let nc = n.n_cavity;
    let nn = n.n_noise;
    if nc == 0 {
        return Err(CavityError::MalformedNetwork(
            "network has no cavity-facing channels".into(),
        ));
    }
    let s = &n.s_matrix;

    let s_gb = s.view((0, 0), (nc, ne)).into_owned();
    let s_gf = s.view((0, ne), (nc, nc)).into_owned();
    let s_gn = s.view((0, ne + nc), (nc, nn)).into_owned();
    let s_ob = s.view((nc, 0), (ne, ne)).into_owned();
    let s_of = s.view((nc, ne), (ne, nc)).into_owned();
    let s_on = s.view((nc, ne + nc), (ne, nn)).into_owned();

    // Loop matrix combining the network back-scattering with the prompt
    // mirror reflection.
    let loop_matrix = DMatrix::<Complex64>::identity(nc, nc) + &s_gf;
    let sv = loop_matrix.clone().svd(false, false).singular_values;
    let sv_max = sv.iter().cloned().fold(0.0f64, f64::max);
    let sv_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if sv_min <= 0.0 || !sv_min.is_finite() {
        return Err(CavityError::NearSingularFeedback { denominator: sv_min });
    }
    let condition = sv_max / sv_min;
    if condition > tol::LOOP_CONDITION_MAX {
        return Err(CavityError::IllConditionedLoop { condition });
    }

    let lu = loop_matrix.clone().lu();
    let solve_mat = |rhs: &DMatrix<Complex64>| -> Result<DMatrix<Complex64>> {
        lu.solve(rhs).ok_or(CavityError::NearSingularFeedback {
            denominator: sv_min,
        })
    };
    let solve_vec = |rhs: &DVector<Complex64>| -> Result<DVector<Complex64>> {
        lu.solve(rhs).ok_or(CavityError::NearSingularFeedback {
            denominator: sv_min,
        })
    };

    let k = DVector::<Complex64>::from_iterator(
        nc,
        n.cavity_couplings.iter().map(|g| Complex64::from(g.sqrt())),
    );

    // x_f = (I + S_gf)^{-1} S_gf k and x_k = (I + S_gf)^{-1} k.
    let x_f = solve_vec(&(&s_gf * &k))?;
    let x_k = solve_vec(&k)?;
    let x_b = solve_mat(&s_gb)?;
    let x_n = solve_mat(&s_gn)?;

    // Pole shift: i omega + Gamma/2 = i omega0 + Gamma0/2 - k' x_f.
    let gamma0: f64 = n.cavity_couplings.iter().sum::<f64>() + n.absorb_rate;
    let z: Complex64 = k.iter().zip(x_f.iter()).map(|(ki, xi)| ki * xi).sum();
    let gamma_eff = gamma0 - 2.0 * z.re;
    let omega_eff = n.omega0 - z.im;
    if !(gamma_eff.is_finite() && gamma_eff > 0.0) {
        return Err(CavityError::MalformedNetwork(format!(
            "eliminated decay rate is not positive ({gamma_eff})"
        )));
    }

    // Injection coefficients k' (I + S_gf)^{-1} S_gb and the cavity noise row.
    let t_c: Vec<Complex64> = (0..ne)
        .map(|p| k.iter().zip(x_b.column(p).iter()).map(|(ki, xi)| ki * xi).sum())
        .collect();
    let mut noise_cav: Vec<Complex64> = (0..nn)
        .map(|q| k.iter().zip(x_n.column(q).iter()).map(|(ki, xi)| ki * xi).sum())
        .collect();
    noise_cav.push(Complex64::from(n.absorb_rate.sqrt()));

    // Output-side coefficients.
    let t_o_vec = (&s_of * &x_k).into_owned();
    let prompt = &s_ob - &s_of * &x_b;
    let noise_out_mat = &s_on - &s_of * &x_n;

    // The coefficient model carries one prompt reflection per port; a network
    // that scatters one external input promptly into another external output
    // is outside it.
    let scale = 1.0 + prompt.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    for i in 0..ne {
        for j in 0..ne {
            if i != j && prompt[(i, j)].norm() > 1e-10 * scale {
                return Err(CavityError::MalformedNetwork(format!(
                    "prompt cross-port coupling {} -> {} is {:.3e}",
                    j,
                    i,
                    prompt[(i, j)].norm()
                )));
            }
        }
    }

    let ports: Vec<RadiativePort> = (0..ne)
        .map(|p| {
            let mut noise_out: Vec<Complex64> =
                (0..nn).map(|q| noise_out_mat[(p, q)]).collect();
            noise_out.push(Complex64::from(0.0));
            RadiativePort::new(t_c[p], t_o_vec[p], prompt[(p, p)], noise_out)
        })
        .collect();

    CavityCoefficients::new(gamma_eff, omega_eff, ports, noise_cav)
}

/// Composition of the two-sided scheme through the generic eliminator.
///
/// The output is a two-port model with noise dimension 5: the right port's
/// output noise occupies slots 1-2, the left port's slots 3-4, and the
/// non-radiative channel the final slot.
pub fn compose_two_sided(s: &TwoSidedScheme) -> Result<CavityCoefficients> {
    eliminate_network(&build_two_sided(s)?)
}
