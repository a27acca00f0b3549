use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::Axis;
use crate::numkit::cdot;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pure state of `n_qubits` qubits. Qubit 0 is the most significant bit of the
/// basis index, so `H₂ ⊗ I` acts on qubits 0 and 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        cdot(&self.amplitudes, &other.amplitudes)
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies `exp(−i·angle·P/2)` on `qubit`.
    pub fn apply_rotation(&mut self, qubit: usize, axis: Axis, angle: f64) {
        let (s, c) = (0.5 * angle).sin_cos();
        let mask = self.mask(qubit);
        let amps = &mut self.amplitudes;
        match axis {
            Axis::X => {
                let mis = Complex64::new(0.0, -s);
                for i0 in (0..amps.len()).filter(|i| i & mask == 0) {
                    let (a0, a1) = (amps[i0], amps[i0 | mask]);
                    amps[i0] = a0 * c + a1 * mis;
                    amps[i0 | mask] = a0 * mis + a1 * c;
                }
            }
            Axis::Y => {
                for i0 in (0..amps.len()).filter(|i| i & mask == 0) {
                    let (a0, a1) = (amps[i0], amps[i0 | mask]);
                    amps[i0] = a0 * c - a1 * s;
                    amps[i0 | mask] = a0 * s + a1 * c;
                }
            }
            Axis::Z => {
                let p0 = Complex64::new(c, -s);
                let p1 = Complex64::new(c, s);
                for (i, a) in amps.iter_mut().enumerate() {
                    *a *= if i & mask == 0 { p0 } else { p1 };
                }
            }
        }
    }

    /// Multiplies by the Pauli operator `P` on `qubit`.
    pub fn apply_pauli(&mut self, qubit: usize, axis: Axis) {
        let mask = self.mask(qubit);
        let amps = &mut self.amplitudes;
        match axis {
            Axis::X => {
                for i0 in (0..amps.len()).filter(|i| i & mask == 0) {
                    amps.swap(i0, i0 | mask);
                }
            }
            Axis::Y => {
                for i0 in (0..amps.len()).filter(|i| i & mask == 0) {
                    let (a0, a1) = (amps[i0], amps[i0 | mask]);
                    amps[i0] = -I * a1;
                    amps[i0 | mask] = I * a0;
                }
            }
            Axis::Z => {
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) {
        let both = self.mask(q1) | self.mask(q2);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & both == both {
                *a = -*a;
            }
        }
    }

    /// `⟨self| P_qubit |other⟩`
    pub fn pauli_matrix_element(&self, other: &StateVector, qubit: usize, axis: Axis) -> Complex64 {
        let mask = self.mask(qubit);
        let (l, r) = (&self.amplitudes, &other.amplitudes);
        let mut acc = ZERO;
        match axis {
            Axis::X => {
                for i in 0..l.len() {
                    acc += l[i].conj() * r[i ^ mask];
                }
            }
            Axis::Y => {
                // (Y r)_i = -i r_{i|m} if bit clear, +i r_{i&!m} if set
                for i in 0..l.len() {
                    let f = if i & mask == 0 { -I } else { I };
                    acc += l[i].conj() * f * r[i ^ mask];
                }
            }
            Axis::Z => {
                for i in 0..l.len() {
                    let t = l[i].conj() * r[i];
                    acc += if i & mask == 0 { t } else { -t };
                }
            }
        }
        acc
    }

    pub fn pauli_expectation(&self, qubit: usize, axis: Axis) -> f64 {
        self.pauli_matrix_element(self, qubit, axis).re
    }
}
