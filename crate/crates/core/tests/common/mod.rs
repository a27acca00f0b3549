#![allow(dead_code)]
//! Reference implementations shared by the integration tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use vqgeo::numkit::ComplexMatrix;
use vqgeo::qsim::{Axis, CircuitSpec};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let e = match axis {
        Axis::X => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        Axis::Y => [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        Axis::Z => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
    };
    ComplexMatrix::from_row_major(2, 2, e.to_vec()).unwrap()
}

/// `op` on `qubit` of `n`, qubit 0 being the most significant.
pub fn embed(op: &ComplexMatrix, qubit: usize, n: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let mut m = ComplexMatrix::identity(1);
    for q in 0..n {
        m = m.kron(if q == qubit { op } else { &id });
    }
    m
}

pub fn rotation(axis: Axis, angle: f64) -> ComplexMatrix {
    let (s, co) = (0.5 * angle).sin_cos();
    ComplexMatrix::identity(2)
        .scale(c(co, 0.0))
        .sub(&pauli(axis).scale(c(0.0, s)))
}

pub fn cz_chain(n: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..1usize << n)
        .map(|b| {
            let bit = |q: usize| (b >> (n - 1 - q)) & 1;
            let pairs = (0..n - 1).filter(|&q| bit(q) == 1 && bit(q + 1) == 1).count();
            if pairs % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    ComplexMatrix::from_diag(&diag)
}

/// Dense-matrix reference state after `layers` layers.
pub fn dense_state(spec: &CircuitSpec, theta: &[f64], layers: usize) -> Vec<Complex64> {
    let n = spec.n_qubits;
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    for q in 0..n {
        v = embed(&rotation(Axis::Y, std::f64::consts::FRAC_PI_4), q, n).matvec(&v);
    }
    for l in 0..layers {
        for q in 0..n {
            v = embed(&rotation(spec.axes[l][q], theta[spec.param_index(l, q)]), q, n).matvec(&v);
        }
        v = cz_chain(n).matvec(&v);
    }
    v
}

/// Trapezoid rule on a square grid for `∫∫ √(P(x₁)P(x₂)) K(x₁ − x₂) w(x₁, x₂)`
/// with a unit-mass Gaussian kernel of width `κ`.
pub fn kernel_integral(mu: f64, delta: f64, kappa: f64, w: impl Fn(f64, f64) -> f64) -> f64 {
    let half = 12.0 * delta;
    let h = (delta.min(kappa)) / 12.0;
    let n = (2.0 * half / h).ceil() as usize;
    let h = 2.0 * half / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| mu - half + i as f64 * h).collect();
    let sqrt_p: Vec<f64> = xs
        .iter()
        .map(|x| ((-(x - mu).powi(2) / (2.0 * delta * delta)).exp() / (2.0 * PI * delta * delta).sqrt()).sqrt())
        .collect();
    let norm = 1.0 / ((2.0 * PI).sqrt() * kappa);
    let mut acc = 0.0;
    for (i, &x1) in xs.iter().enumerate() {
        for (j, &x2) in xs.iter().enumerate() {
            let k = norm * (-(x1 - x2).powi(2) / (2.0 * kappa * kappa)).exp();
            acc += sqrt_p[i] * sqrt_p[j] * k * w(x1, x2);
        }
    }
    acc * h * h
}
