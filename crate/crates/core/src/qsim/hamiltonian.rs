use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::STREAM_HAMILTONIAN;
use super::state::StateVector;
use crate::error::{ensure_dims, Result};
use crate::numkit::{eigh, from_spectrum, ComplexMatrix, SplitRng};

pub const DEFAULT_GAP: f64 = 1.5;
/// Ground energy fixed by the spectrum surgery.
pub const GROUND_ENERGY: f64 = -1.0;

/// `H = H₂ ⊗ I^{⊗(n−2)}` with `H₂` acting on qubits 0 and 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GappedHamiltonian {
    pub n_qubits: usize,
    pub local: ComplexMatrix,
    pub matrix: ComplexMatrix,
    pub e0: f64,
    pub gap: f64,
    pub seed: u64,
}

impl GappedHamiltonian {
    /// Embeds an arbitrary Hermitian 4×4 `local`; `e0` and `gap` are read off
    /// its spectrum.
    pub fn from_local(n_qubits: usize, local: ComplexMatrix, seed: u64) -> Result<Self> {
        ensure_dims(n_qubits >= 2, || format!("need at least 2 qubits, got {n_qubits}"))?;
        ensure_dims(local.rows() == 4 && local.cols() == 4, || {
            format!("local term must be 4x4, got {}x{}", local.rows(), local.cols())
        })?;
        let (values, _) = eigh(&local)?;
        let matrix = local.kron(&ComplexMatrix::identity(1 << (n_qubits - 2)));
        Ok(Self {
            n_qubits,
            e0: values[0],
            gap: values[1] - values[0],
            local,
            matrix,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `H|ψ⟩` using only the 4×4 block.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let shift = self.n_qubits - 2;
        let rest = 1usize << shift;
        let amps = psi.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for r in 0..rest {
            let v: [Complex64; 4] = std::array::from_fn(|b| amps[(b << shift) | r]);
            for (a, slot) in (0..4).map(|a| (a, (a << shift) | r)) {
                out[slot] = (0..4).map(|b| self.local.get(a, b) * v[b]).sum();
            }
        }
        StateVector::from_amplitudes(self.n_qubits, out)
    }

    pub fn expectation(&self, psi: &StateVector) -> f64 {
        psi.inner(&self.apply(psi)).re
    }
}

/// Random gapped Hamiltonian.
///
/// `H₂ = (A + A†)/2` with i.i.d. standard normal real and imaginary parts in
/// `A`. Its sorted spectrum `λ₀ ≤ … ≤ λ₃` is replaced by `λ'₀ = −1`,
/// `λ'₁ = −1 + gap`, `λ'ₖ = λ'₁ + (λₖ − λ₁)·gap/(λ₁ − λ₀)` while keeping the
/// eigenvectors.
pub fn sample_hamiltonian(seed: u64, n_qubits: usize, gap: f64) -> Result<GappedHamiltonian> {
    ensure_dims(n_qubits >= 2, || format!("need at least 2 qubits, got {n_qubits}"))?;
    let mut rng = SplitRng::with_path(seed, &[STREAM_HAMILTONIAN]);
    let a = ComplexMatrix::from_fn(4, 4, |_, _| {
        let re = rng.gaussian();
        Complex64::new(re, rng.gaussian())
    });
    let raw = ComplexMatrix::from_fn(4, 4, |i, j| 0.5 * (a.get(i, j) + a.get(j, i).conj()));
    let (lambda, vectors) = eigh(&raw)?;
    let raw_gap = lambda[1] - lambda[0];
    let e1 = GROUND_ENERGY + gap;
    let values: Vec<f64> = lambda
        .iter()
        .enumerate()
        .map(|(k, &l)| match k {
            0 => GROUND_ENERGY,
            1 => e1,
            _ => e1 + (l - lambda[1]) * gap / raw_gap,
        })
        .collect();
    let local = from_spectrum(&values, &vectors);
    let matrix = local.kron(&ComplexMatrix::identity(1 << (n_qubits - 2)));
    Ok(GappedHamiltonian {
        n_qubits,
        local,
        matrix,
        e0: GROUND_ENERGY,
        gap,
        seed,
    })
}
