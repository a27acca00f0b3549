use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use super::matrix::{dot, ComplexMatrix, RealSymMatrix};
use crate::error::{ensure_dims, Error, Result};

/// First damping tried once the caller's damping fails to factorize.
pub const ESCALATION_FLOOR: f64 = 1e-8;
/// Number of tenfold damping escalations before giving up.
pub const ESCALATION_STEPS: usize = 12;

/// Tolerance on `|h_ij - conj(h_ji)|` accepted by [`eigh`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Cholesky factor of `M + damping·I`, reusable across right-hand sides.
///
/// If the requested damping does not give a positive definite matrix the
/// damping is escalated: it jumps to [`ESCALATION_FLOOR`] (or is multiplied by
/// ten when already above it), at most [`ESCALATION_STEPS`] times.
#[derive(Debug, Clone)]
pub struct SymFactor {
    chol: Cholesky<f64, Dyn>,
    damping: f64,
}

impl SymFactor {
    pub fn new(m: &RealSymMatrix, damping: f64) -> Result<Self> {
        let base = m.to_nalgebra();
        let mut d = damping.max(0.0);
        let mut escalations = 0;
        loop {
            let mut shifted = base.clone();
            for i in 0..m.dim() {
                shifted[(i, i)] += d;
            }
            if let Some(chol) = Cholesky::new(shifted) {
                return Ok(Self { chol, damping: d });
            }
            if escalations == ESCALATION_STEPS {
                return Err(Error::NotPositiveDefinite {
                    dim: m.dim(),
                    damping: d,
                });
            }
            d = if d < ESCALATION_FLOOR {
                ESCALATION_FLOOR
            } else {
                d * 10.0
            };
            escalations += 1;
        }
    }

    /// Damping actually applied (after any escalation).
    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim());
        let x = self.chol.solve(&DVector::from_column_slice(b));
        x.iter().copied().collect()
    }

    /// Explicit inverse of the damped matrix.
    pub fn inverse(&self) -> RealSymMatrix {
        let inv = self.chol.inverse();
        let n = inv.nrows();
        let mut out = RealSymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                out.set(i, j, 0.5 * (inv[(i, j)] + inv[(j, i)]));
            }
        }
        out
    }
}

/// Solves `(M + damping·I) x = b`.
pub fn solve_sym(m: &RealSymMatrix, b: &[f64], damping: f64) -> Result<Vec<f64>> {
    ensure_dims(m.dim() == b.len(), || {
        format!("matrix dim {} vs rhs length {}", m.dim(), b.len())
    })?;
    Ok(SymFactor::new(m, damping)?.solve(b))
}

/// Applies the Sherman–Morrison correction given `y = A⁻¹b` and `z = A⁻¹v`:
/// returns `(A + xi·v vᵀ)⁻¹ b = y − xi·(vᵀy)/(1 + xi·vᵀz)·z`.
pub fn rank1_correction(y: &[f64], z: &[f64], v: &[f64], xi: f64) -> Vec<f64> {
    let vty = dot(v, y);
    let vtz = dot(v, z);
    let coef = xi * vty / (1.0 + xi * vtz);
    y.iter().zip(z).map(|(yi, zi)| yi - coef * zi).collect()
}

/// Solves `(M + damping·I + xi·v vᵀ) x = b` with two solves against the
/// damped base matrix and a rank-1 correction.
pub fn sherman_morrison_solve(m: &RealSymMatrix, v: &[f64], xi: f64, b: &[f64], damping: f64) -> Result<Vec<f64>> {
    ensure_dims(m.dim() == b.len() && m.dim() == v.len(), || {
        format!(
            "matrix dim {} vs v length {} and rhs length {}",
            m.dim(),
            v.len(),
            b.len()
        )
    })?;
    if xi < 0.0 {
        return Err(Error::DomainError(format!("xi must be nonnegative, got {xi}")));
    }
    let factor = SymFactor::new(m, damping)?;
    let y = factor.solve(b);
    let z = factor.solve(v);
    Ok(rank1_correction(&y, &z, v, xi))
}

/// Dense LU solve of a general square system, used where an independent route
/// is wanted.
pub fn dense_solve(rows: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    ensure_dims(rows.len() == n && rows.iter().all(|r| r.len() == n), || {
        "dense_solve needs a square system".to_string()
    })?;
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let x = a
        .lu()
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::NotPositiveDefinite { dim: n, damping: 0.0 })?;
    Ok(x.iter().copied().collect())
}

/// Hermitian eigendecomposition. Eigenvalues ascending; eigenvectors are the
/// columns of the returned matrix.
pub fn eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.rows();
    let eig = h.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// `U diag(λ) U†`
pub fn from_spectrum(values: &[f64], vectors: &ComplexMatrix) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| vectors.get(i, k) * values[k] * vectors.get(j, k).conj())
            .sum::<Complex64>()
    })
}
