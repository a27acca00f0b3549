mod common;

use common::{c, dense_state, embed, pauli};
use num_complex::Complex64;
use vqgeo::numkit::{cdot, ComplexMatrix, SplitRng};
use vqgeo::qgt::{block_qgt, fubini_study, full_qgt};
use vqgeo::qsim::*;

#[test]
fn prepared_states_are_unit_and_match_dense_reference() {
    for seed in 0..100u64 {
        let n = 2 + (seed % 4) as usize;
        let layers = 1 + (seed % 3) as usize;
        let spec = sample_circuit(seed, n, layers).unwrap();
        let theta = sample_params(seed, n, layers);
        let psi = prepare_state(&spec, &theta, None).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12, "seed {seed}");
        if seed < 20 {
            let reference = dense_state(&spec, &theta, layers);
            for (a, b) in psi.amplitudes().iter().zip(&reference) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn block_qgt_matches_dense_covariance() {
    for seed in 0..10u64 {
        let (n, layers) = (4, 3);
        let spec = sample_circuit(seed, n, layers).unwrap();
        let theta = sample_params(seed, n, layers);
        let q = block_qgt(&spec, &theta).unwrap();
        for l in 0..layers {
            let psi = dense_state(&spec, &theta, l);
            let ops: Vec<ComplexMatrix> = (0..n).map(|i| embed(&pauli(spec.axes[l][i]), i, n)).collect();
            let pv: Vec<Vec<Complex64>> = ops.iter().map(|p| p.matvec(&psi)).collect();
            for i in 0..n {
                for j in 0..n {
                    let pij = cdot(&pv[i], &pv[j]).re;
                    let (pi, pj) = (cdot(&psi, &pv[i]).re, cdot(&psi, &pv[j]).re);
                    let want = 0.25 * (pij - pi * pj);
                    assert!((q.blocks[l].get(i, j) - want).abs() < 1e-12, "seed {seed} layer {l}");
                }
            }
        }
    }
}

#[test]
fn full_qgt_is_half_the_infidelity_hessian() {
    for seed in 0..6u64 {
        let n = 2 + (seed % 2) as usize;
        let spec = sample_circuit(seed, n, 2).unwrap();
        let theta = sample_params(seed, n, 2);
        let g = full_qgt(&spec, &theta).unwrap();
        let psi = prepare_state(&spec, &theta, None).unwrap();
        let fidelity = |d: &[(usize, f64)]| {
            let mut t = theta.clone();
            d.iter().for_each(|&(k, v)| t[k] += v);
            psi.inner(&prepare_state(&spec, &t, None).unwrap()).norm_sqr()
        };
        let h = 1e-3;
        for i in 0..theta.len() {
            for j in 0..theta.len() {
                let d2 = (fidelity(&[(i, h), (j, h)]) - fidelity(&[(i, h), (j, -h)]) - fidelity(&[(i, -h), (j, h)])
                    + fidelity(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
                assert!((-0.5 * d2 - g.get(i, j)).abs() < 1e-4, "seed {seed} ({i},{j})");
            }
        }
    }
}

#[test]
fn fubini_study_is_phase_gauge_invariant() {
    let mut rng = SplitRng::new(17);
    for seed in 0..5u64 {
        let spec = sample_circuit(seed, 3, 2).unwrap();
        let theta = sample_params(seed, 3, 2);
        let (psi, dpsi) = state_derivatives(&spec, &theta).unwrap();
        let base = fubini_study(&psi, &dpsi);
        // f(θ) = Σ a_k sin θ_k
        let a: Vec<f64> = (0..theta.len()).map(|_| rng.gaussian()).collect();
        let f: f64 = a.iter().zip(&theta).map(|(a, t)| a * t.sin()).sum();
        let phase = Complex64::from_polar(1.0, f);
        let psi_g = StateVector::from_amplitudes(3, psi.amplitudes().iter().map(|v| phase * v).collect());
        let dpsi_g: Vec<StateVector> = dpsi
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let df = a[k] * theta[k].cos();
                let amps = d
                    .amplitudes()
                    .iter()
                    .zip(psi.amplitudes())
                    .map(|(dv, pv)| phase * (dv + c(0.0, df) * pv))
                    .collect();
                StateVector::from_amplitudes(3, amps)
            })
            .collect();
        let gauged = fubini_study(&psi_g, &dpsi_g);
        assert!(gauged.sub(&base).frobenius_norm() < 1e-9);
    }
}

#[test]
fn energy_is_bounded_below_by_ground_energy() {
    for seed in 0..20u64 {
        let spec = sample_circuit(seed, 4, 2).unwrap();
        let h = sample_hamiltonian(seed, 4, DEFAULT_GAP).unwrap();
        let e = energy(&spec, &sample_params(seed, 4, 2), &h).unwrap();
        assert!(e >= GROUND_ENERGY - 1e-12);
    }
}
