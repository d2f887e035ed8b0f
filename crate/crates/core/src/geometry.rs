//! Unitary-vector-space view of the unwanted-noise operators.
//!
//! The two noise operators of a one-sided model (and the three of a two-sided
//! one) are vectors in a unitary space; their commutator pairings are ordinary
//! scalar products of the expansion-coefficient vectors. Everything observable
//! about the noise, norms, the cross coefficient, and all constraint
//! residuals, is Gram data: invariant under any simultaneous unitary rotation
//! of the shared basis. This module provides the scalar product, Gram matrix,
//! the magnitude/phase/angle decomposition of the cross coefficient, basis
//! rotation, and reduction to a minimal basis of dimension equal to the Gram
//! rank (at most two vectors per one-sided model, three per two-sided).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CavityError, Result};
use crate::model::CavityCoefficients;
use crate::tol;

/// Scalar product `sum_k conj(u_k) * v_k` of two noise vectors.
///
/// Conjugate-symmetric: swapping the arguments conjugates the result.
pub fn noise_inner_product(u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    if u.len() != v.len() {
        return Err(CavityError::DimensionMismatch {
            what: "noise vectors",
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(u.iter().zip(v).map(|(a, b)| a.conj() * b).sum())
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Hermitian positive-semidefinite matrix of pairwise noise scalar products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramData {
    pub matrix: DMatrix<Complex64>,
}

impl GramData {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Real eigenvalues of the Hermitian matrix, ascending.
    ///
    /// Computed through the real symmetric embedding [[Re, -Im], [Im, Re]],
    /// whose spectrum is that of the Hermitian matrix with every eigenvalue
    /// doubled in multiplicity.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let mut real = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.matrix[(i, j)];
                real[(i, j)] = z.re;
                real[(i, j + n)] = -z.im;
                real[(i + n, j)] = z.im;
                real[(i + n, j + n)] = z.re;
            }
        }
        let mut eigs: Vec<f64> = real.symmetric_eigen().eigenvalues.iter().cloned().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Every eigenvalue appears twice in the embedding; keep one of each.
        eigs.into_iter().step_by(2).collect()
    }

    /// True iff every eigenvalue is at least `-rel_tol * trace`.
    pub fn is_positive_semidefinite(&self, rel_tol: f64) -> bool {
        let trace: f64 = (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum();
        let floor = -rel_tol * trace.max(1.0);
        self.eigenvalues().iter().all(|&e| e >= floor)
    }
}

/// Gram matrix `G[i][j] = <v_i, v_j>` of a family of noise vectors.
pub fn gram_matrix(vs: &[&[Complex64]]) -> Result<GramData> {
    let n = vs.len();
    if let Some(first) = vs.first() {
        for v in vs {
            if v.len() != first.len() {
                return Err(CavityError::DimensionMismatch {
                    what: "noise vectors",
                    expected: first.len(),
                    got: v.len(),
                });
            }
        }
    }
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            matrix[(i, j)] = noise_inner_product(vs[i], vs[j])?;
        }
    }
    Ok(GramData { matrix })
}

/// Gram matrix over a model's noise vectors (Langevin vector first, then one
/// output vector per port).
pub fn model_gram(c: &CavityCoefficients) -> GramData {
    gram_matrix(&c.noise_vectors()).expect("model noise vectors share one length")
}

/// Magnitude/phase/angle decomposition of the cross coefficient between the
/// Langevin noise vector and an output noise vector:
/// `xi = magnitude_c * magnitude_o * exp(i kappa) * cos(zeta)`.
///
/// `zeta` is confined to [0, pi/2] so `kappa` carries all phase; for an exactly
/// orthogonal pair (`xi = 0`) `kappa` is fixed to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct XiDecomposition {
    /// Phase of the cross coefficient, in (-pi, pi].
    pub kappa: f64,
    /// Angle between the vectors, in [0, pi/2].
    pub zeta: f64,
    /// Norm of the Langevin noise vector.
    pub magnitude_c: f64,
    /// Norm of the output noise vector.
    pub magnitude_o: f64,
}

impl XiDecomposition {
    /// Reconstructs the cross coefficient from the decomposition.
    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(
            self.magnitude_c * self.magnitude_o * self.zeta.cos(),
            self.kappa,
        )
    }
}

/// Decomposes the cross coefficient `xi = sum_k c_k * conj(o_k)` of a pair of
/// nonzero noise vectors.
pub fn xi_decompose(noise_cav: &[Complex64], noise_out: &[Complex64]) -> Result<XiDecomposition> {
    let magnitude_c = norm(noise_cav);
    let magnitude_o = norm(noise_out);
    if magnitude_c == 0.0 || magnitude_o == 0.0 {
        return Err(CavityError::UndefinedAngle);
    }
    // xi pairs the Langevin vector against the conjugated output vector,
    // i.e. xi = <noise_out, noise_cav>.
    let xi = noise_inner_product(noise_out, noise_cav)?;
    // Cauchy-Schwarz bounds |xi| by the norm product; clamp roundoff excess.
    let cos_zeta = (xi.norm() / (magnitude_c * magnitude_o)).min(1.0);
    let kappa = if xi.norm() == 0.0 { 0.0 } else { xi.arg() };
    Ok(XiDecomposition {
        kappa,
        zeta: cos_zeta.acos(),
        magnitude_c,
        magnitude_o,
    })
}

/// Applies a unitary matrix to every noise vector of the model.
///
/// All Gram data, and therefore every constraint residual, is unchanged.
pub fn rotate_basis(c: &CavityCoefficients, u: &DMatrix<Complex64>) -> Result<CavityCoefficients> {
    let dim = c.noise_dim();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(CavityError::DimensionMismatch {
            what: "rotation matrix",
            expected: dim,
            got: u.nrows().max(u.ncols()),
        });
    }
    let deviation = unitarity_deviation(u);
    if deviation > tol::UNITARY_TOL {
        return Err(CavityError::NonUnitary { deviation });
    }
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        (0..dim)
            .map(|i| (0..dim).map(|j| u[(i, j)] * v[j]).sum())
            .collect()
    };
    let noise_cav = apply(c.noise_cav());
    let noise_out = c
        .ports()
        .iter()
        .map(|p| apply(&p.noise_out))
        .collect::<Vec<_>>();
    c.with_noise_vectors(noise_cav, noise_out)
}

/// Max-entry deviation of `u' u` from the identity.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    if n != u.ncols() {
        return f64::INFINITY;
    }
    let product = u.adjoint() * u;
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                Complex64::from(1.0)
            } else {
                Complex64::from(0.0)
            };
            dev = dev.max((product[(i, j)] - target).norm());
        }
    }
    dev
}

/// Rewrites the model in a minimal noise basis.
///
/// The new dimension equals the rank of the Gram matrix of all noise vectors;
/// norms, cross coefficients, and constraint residuals are preserved to
/// roundoff. Vectors are orthonormalized in declared order (Langevin vector
/// first, then port output vectors) by twice-iterated modified Gram-Schmidt,
/// dropping residuals below `BASIS_RANK_CUTOFF` relative to the largest input
/// norm, so the reduced representative is deterministic.
pub fn reduce_basis(c: &CavityCoefficients) -> CavityCoefficients {
    let vectors = c.noise_vectors();
    let max_norm = vectors.iter().map(|v| norm(v)).fold(0.0f64, f64::max);
    let cutoff = tol::BASIS_RANK_CUTOFF * max_norm;

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut coords: Vec<Vec<Complex64>> = Vec::new();

    for v in &vectors {
        let mut coeffs: Vec<Complex64> = Vec::with_capacity(basis.len() + 1);
        let mut residual: Vec<Complex64> = v.to_vec();
        for q in &basis {
            let overlap = noise_inner_product(q, &residual).expect("equal lengths");
            for (r, qk) in residual.iter_mut().zip(q) {
                *r -= overlap * qk;
            }
            coeffs.push(overlap);
        }
        // Second Gram-Schmidt pass on the residual for orthogonality near
        // machine precision when vectors are nearly parallel.
        for (idx, q) in basis.iter().enumerate() {
            let overlap = noise_inner_product(q, &residual).expect("equal lengths");
            for (r, qk) in residual.iter_mut().zip(q) {
                *r -= overlap * qk;
            }
            coeffs[idx] += overlap;
        }
        let r_norm = norm(&residual);
        if r_norm > cutoff {
            let inv = Complex64::from(1.0 / r_norm);
            basis.push(residual.iter().map(|z| z * inv).collect());
            coeffs.push(Complex64::from(r_norm));
        }
        coords.push(coeffs);
    }

    let rank = basis.len();
    let pad = |mut v: Vec<Complex64>| -> Vec<Complex64> {
        v.resize(rank, Complex64::from(0.0));
        v
    };
    let mut iter = coords.into_iter();
    let noise_cav = pad(iter.next().expect("at least one noise vector"));
    let noise_out: Vec<Vec<Complex64>> = iter.map(pad).collect();

    c.with_noise_vectors(noise_cav, noise_out)
        .expect("reduction preserves validity")
}
