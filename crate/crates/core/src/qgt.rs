//! Block-diagonal quantum geometric tensor, its multiplicative noise model, and
//! the exact full tensor used as an oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, Result};
use crate::numkit::{ComplexMatrix, RealSymMatrix, SplitRng};
use crate::qsim::{prepare_state, state_derivatives, CircuitSpec, StateVector};

pub const DEFAULT_NOISE_STRENGTH: f64 = 0.1;
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Largest register accepted by [`full_qgt`].
pub const FULL_QGT_MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockQGT {
    pub blocks: Vec<RealSymMatrix>,
    pub noisy: bool,
    pub noise_strength: f64,
    pub epsilon: f64,
}

impl BlockQGT {
    pub fn n_params(&self) -> usize {
        self.blocks.iter().map(RealSymMatrix::dim).sum()
    }

    /// Dense block-diagonal matrix.
    pub fn to_dense(&self) -> RealSymMatrix {
        let mut out = RealSymMatrix::zeros(self.n_params());
        let mut offset = 0;
        for b in &self.blocks {
            for i in 0..b.dim() {
                for j in i..b.dim() {
                    out.set(offset + i, offset + j, b.get(i, j));
                }
            }
            offset += b.dim();
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Per-layer covariance `¼(Re⟨P_iP_j⟩ − ⟨P_i⟩⟨P_j⟩)` of the layer generators,
/// evaluated in the state entering that layer.
pub fn block_qgt(spec: &CircuitSpec, theta: &[f64]) -> Result<BlockQGT> {
    let mut psi = prepare_state(spec, theta, Some(0))?;
    let mut blocks = Vec::with_capacity(spec.n_layers);
    for l in 0..spec.n_layers {
        blocks.push(layer_covariance(&psi, &spec.axes[l]));
        spec.apply_layer(&mut psi, theta, l);
    }
    Ok(BlockQGT {
        blocks,
        noisy: false,
        noise_strength: 0.0,
        epsilon: DEFAULT_EPSILON,
    })
}

fn layer_covariance(psi: &StateVector, axes: &[crate::qsim::Axis]) -> RealSymMatrix {
    let n = axes.len();
    let images: Vec<StateVector> = axes
        .iter()
        .enumerate()
        .map(|(q, &axis)| {
            let mut p = psi.clone();
            p.apply_pauli(q, axis);
            p
        })
        .collect();
    let means: Vec<f64> = images.iter().map(|p| psi.inner(p).re).collect();
    let mut block = RealSymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let pp = images[i].inner(&images[j]).re;
            block.set(i, j, 0.25 * (pp - means[i] * means[j]));
        }
    }
    block
}

/// `gb_ij + (|gb_ij| + ε)·ς·β_ij` with symmetric standard normal `β`
/// (diagonal included), drawn independently per block.
pub fn apply_noise(q: &BlockQGT, strength: f64, epsilon: f64, rng: &mut SplitRng) -> BlockQGT {
    if strength == 0.0 {
        return q.clone();
    }
    let blocks = q
        .blocks
        .iter()
        .map(|b| {
            let mut out = b.clone();
            for i in 0..b.dim() {
                for j in i..b.dim() {
                    let g = b.get(i, j);
                    out.set(i, j, g + (g.abs() + epsilon) * strength * rng.gaussian());
                }
            }
            out
        })
        .collect();
    BlockQGT {
        blocks,
        noisy: true,
        noise_strength: strength,
        epsilon,
    }
}

/// Complex tensor `⟨∂_iψ|∂_jψ⟩ − ⟨∂_iψ|ψ⟩⟨ψ|∂_jψ⟩` for a normalized state and
/// its parameter derivatives.
pub fn fubini_study(psi: &StateVector, dpsi: &[StateVector]) -> ComplexMatrix {
    let k = dpsi.len();
    let conn: Vec<Complex64> = dpsi.iter().map(|d| d.inner(psi)).collect();
    let mut out = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = dpsi[i].inner(&dpsi[j]) - conn[i] * conn[j].conj();
            out.set(i, j, v);
            out.set(j, i, v.conj());
        }
    }
    out
}

/// Real part of [`fubini_study`] over all circuit parameters.
pub fn full_qgt(spec: &CircuitSpec, theta: &[f64]) -> Result<RealSymMatrix> {
    ensure_dims(spec.n_qubits <= FULL_QGT_MAX_QUBITS, || {
        format!(
            "full_qgt supports at most {FULL_QGT_MAX_QUBITS} qubits, got {}",
            spec.n_qubits
        )
    })?;
    let (psi, dpsi) = state_derivatives(spec, theta)?;
    let fs = fubini_study(&psi, &dpsi);
    let k = dpsi.len();
    let mut out = RealSymMatrix::zeros(k);
    for i in 0..k {
        for j in i..k {
            out.set(i, j, fs.get(i, j).re);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{sample_circuit, sample_params, Axis};

    #[test]
    fn first_layer_z_diagonal() {
        let spec = CircuitSpec::new(vec![vec![Axis::Z, Axis::Z, Axis::X]], 0).unwrap();
        let q = block_qgt(&spec, &[0.3, 0.2, 0.1]).unwrap();
        let b = &q.blocks[0];
        assert!((b.get(0, 0) - 0.125).abs() < 1e-15);
        assert!((b.get(1, 1) - 0.125).abs() < 1e-15);
        assert!(b.get(0, 1).abs() < 1e-15);
        assert!(b.get(0, 2).abs() < 1e-15);
    }

    #[test]
    fn blocks_bounded_and_psd() {
        for seed in 0..10 {
            let spec = sample_circuit(seed, 5, 4).unwrap();
            let q = block_qgt(&spec, &sample_params(seed, 5, 4)).unwrap();
            for b in &q.blocks {
                assert!(b.diag().iter().all(|&d| d <= 0.25 + 1e-15));
                assert!(b.eigenvalues()[0] >= -1e-10);
            }
        }
    }

    #[test]
    fn zero_noise_is_identity() {
        let spec = sample_circuit(1, 3, 2).unwrap();
        let q = block_qgt(&spec, &sample_params(1, 3, 2)).unwrap();
        let mut rng = SplitRng::new(0);
        assert_eq!(apply_noise(&q, 0.0, 1e-6, &mut rng), q);
    }

    #[test]
    fn noise_law_stddev() {
        let q = BlockQGT {
            blocks: vec![RealSymMatrix::from_rows(&[vec![0.2, -0.05], vec![-0.05, 0.0]]).unwrap()],
            noisy: false,
            noise_strength: 0.0,
            epsilon: 1e-6,
        };
        let mut rng = SplitRng::new(77);
        let n = 10_000;
        let mut sums = [[0.0f64; 2]; 2];
        for _ in 0..n {
            let out = apply_noise(&q, 0.1, 1e-2, &mut rng);
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(out.blocks[0].get(i, j), out.blocks[0].get(j, i));
                    sums[i][j] += (out.blocks[0].get(i, j) - q.blocks[0].get(i, j)).powi(2);
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                let sd = (sums[i][j] / n as f64).sqrt();
                let expected = 0.1 * (q.blocks[0].get(i, j).abs() + 1e-2);
                assert!((sd / expected - 1.0).abs() < 0.05, "{i}{j}: {sd} vs {expected}");
            }
        }
    }

    #[test]
    fn one_layer_full_equals_block() {
        let spec = sample_circuit(3, 4, 1).unwrap();
        let theta = sample_params(3, 4, 1);
        let full = full_qgt(&spec, &theta).unwrap();
        let block = block_qgt(&spec, &theta).unwrap();
        assert!(full.max_abs_diff(&block.blocks[0]) < 1e-9);
    }

    #[test]
    fn dense_layout() {
        let spec = sample_circuit(3, 2, 3).unwrap();
        let q = block_qgt(&spec, &sample_params(3, 2, 3)).unwrap();
        let d = q.to_dense();
        assert_eq!(d.dim(), 6);
        assert_eq!(d.get(2, 3), q.blocks[1].get(0, 1));
        assert_eq!(d.get(1, 2), 0.0);
    }

    #[test]
    fn json_roundtrip() {
        let spec = sample_circuit(3, 2, 2).unwrap();
        let q = block_qgt(&spec, &sample_params(3, 2, 2)).unwrap();
        let back: BlockQGT = serde_json::from_str(&q.to_json().unwrap()).unwrap();
        assert_eq!(back, q);
    }
}
