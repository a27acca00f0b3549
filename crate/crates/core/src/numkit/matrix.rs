use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, Error, Result};

/// Dense real symmetric matrix, row-major. Both triangles are stored and kept
/// bit-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl RealSymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![1.0; dim])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * m.dim + i] = d;
        }
        m
    }

    /// Builds from row-major entries, storing `(a_ij + a_ji) / 2` in both
    /// triangles.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        ensure_dims(dim >= 1 && entries.len() == dim * dim, || {
            format!("expected {dim}x{dim} entries, got {}", entries.len())
        })?;
        let mut m = Self { dim, entries };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        ensure_dims(rows.iter().all(|r| r.len() == dim), || {
            "rows must form a square matrix".to_string()
        })?;
        Self::from_row_major(dim, rows.concat())
    }

    pub fn outer(v: &[f64]) -> Self {
        let mut m = Self::zeros(v.len());
        m.add_rank1(1.0, v);
        m
    }

    fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i]);
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg;
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.dim + j] = value;
        self.entries[j * self.dim + i] = value;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn add_diag(&mut self, value: f64) {
        for i in 0..self.dim {
            self.entries[i * self.dim + i] += value;
        }
    }

    /// `self += alpha * v vᵀ`
    pub fn add_rank1(&mut self, alpha: f64, v: &[f64]) {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        for i in 0..n {
            let avi = alpha * v[i];
            for j in 0..n {
                self.entries[i * n + j] += avi * v[j];
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.entries.iter_mut().for_each(|x| *x *= s);
    }

    /// `self = a * self + b * other`
    pub fn axpby(&mut self, a: f64, b: f64, other: &RealSymMatrix) {
        assert_eq!(self.dim, other.dim);
        for (x, y) in self.entries.iter_mut().zip(&other.entries) {
            *x = a * *x + b * y;
        }
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        self.entries.chunks_exact(self.dim).map(|row| dot(row, v)).collect()
    }

    pub fn quad_form(&self, v: &[f64]) -> f64 {
        dot(v, &self.matvec(v))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &RealSymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.entries);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }
}

/// General dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.entries[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Dense complex matrix, row-major. Serialized entries are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        ensure_dims(rows >= 1 && cols >= 1 && entries.len() == rows * cols, || {
            format!("expected {rows}x{cols} entries, got {}", entries.len())
        })?;
        Ok(Self { rows, cols, entries })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `f` is called in row-major order.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.entries[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Largest `|a_ij - conj(a_ji)|`; infinite for non-square matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        ensure_dims(self.cols == other.rows, || {
            format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )
        })?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        self.entries
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * s).collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn real_part(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).re)
    }

    pub fn imag_part(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).im)
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `⟨a|b⟩` with the first argument conjugated.
#[inline]
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFiniteGradient(i)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_symmetrized() {
        let m = RealSymMatrix::from_row_major(2, vec![1.0, 2.0, 4.0, 3.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
    }

    #[test]
    fn rejects_empty_or_ragged() {
        assert!(RealSymMatrix::from_row_major(0, vec![]).is_err());
        assert!(RealSymMatrix::from_row_major(2, vec![1.0; 3]).is_err());
        assert!(RealSymMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn kron_of_paulis() {
        let z = ComplexMatrix::from_diag(&[1.0, -1.0]);
        let zz = z.kron(&z);
        assert_eq!(zz.rows(), 4);
        let d: Vec<f64> = (0..4).map(|i| zz.get(i, i).re).collect();
        assert_eq!(d, vec![1.0, -1.0, -1.0, 1.0]);
    }
}
