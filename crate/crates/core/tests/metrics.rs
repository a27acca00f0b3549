use num_complex::Complex64;
use vqgeo::metrics::*;
use vqgeo::numkit::{cdot, ComplexMatrix, SplitRng};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bloch-sphere family `(cos(θ/2), e^{iφ} sin(θ/2))`.
fn bloch(t: &[f64]) -> Vec<Complex64> {
    let (th, ph) = (t[0], t[1]);
    vec![c((0.5 * th).cos(), 0.0), Complex64::from_polar((0.5 * th).sin(), ph)]
}

fn bloch_derivs(t: &[f64]) -> [Vec<Complex64>; 2] {
    let (th, ph) = (t[0], t[1]);
    [
        vec![
            c(-0.5 * (0.5 * th).sin(), 0.0),
            Complex64::from_polar(0.5 * (0.5 * th).cos(), ph),
        ],
        vec![c(0.0, 0.0), c(0.0, 1.0) * Complex64::from_polar((0.5 * th).sin(), ph)],
    ]
}

fn hermitian_2x2(a: f64, d: f64, off: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![c(a, 0.0), off, off.conj(), c(d, 0.0)]).unwrap()
}

#[test]
fn two_level_tensor_matches_analytic_terms() {
    let fd = FiniteDiff::default().with_richardson();
    let mut rng = SplitRng::new(4);
    for _ in 0..10 {
        let theta = [rng.uniform_range(0.3, 2.8), rng.uniform_range(-3.0, 3.0)];
        let a = hermitian_2x2(
            rng.uniform_range(1.0, 2.0),
            rng.uniform_range(2.0, 3.0),
            c(rng.uniform_range(-0.3, 0.3), rng.uniform_range(-0.3, 0.3)),
        );
        let psi = bloch(&theta);
        let d = bloch_derivs(&theta);
        let loss = cdot(&psi, &a.matvec(&psi)).re;
        let t = la_qgt_tensor(bloch, &a, &theta, &fd).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let fs = cdot(&d[i], &d[j]) - cdot(&d[i], &psi) * cdot(&psi, &d[j]);
                let op = cdot(&d[i], &a.matvec(&d[j])) / loss;
                let mixed = cdot(&d[i], &a.matvec(&psi)) * cdot(&psi, &a.matvec(&d[j])) / (loss * loss);
                let want = fs + op - mixed;
                assert!((t.get(i, j) - want).norm() < 1e-6, "({i},{j})");
            }
        }
        // the Bloch-sphere metric itself
        let plain = la_qgt_tensor(bloch, &ComplexMatrix::identity(2), &theta, &fd).unwrap();
        assert!((plain.get(0, 0).re - 0.5).abs() < 1e-6);
        assert!((plain.get(1, 1).re - 0.5 * (theta[0]).sin().powi(2)).abs() < 1e-6);
    }
}

#[test]
fn berry_is_imaginary_part_for_fixed_operator() {
    let fd = FiniteDiff::default().with_richardson();
    let a = hermitian_2x2(1.5, 2.5, c(0.2, -0.1));
    let theta = [1.1, 0.4];
    let t = la_qgt_tensor(bloch, &a, &theta, &fd).unwrap();
    let b = la_berry(bloch, &a, &theta, &fd).unwrap();
    assert!((b.get(0, 1) - t.get(0, 1).im).abs() < 1e-6);
    assert_eq!(b.get(0, 1), -b.get(1, 0));
}

#[test]
fn non_hermitian_and_zero_loss_are_rejected() {
    let fd = FiniteDiff::default();
    let bad = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!(la_qgt_tensor(bloch, &bad, &[1.0, 0.0], &fd).is_err());
    let proj = ComplexMatrix::from_diag(&[0.0, 1.0]);
    assert!(la_qgt_tensor(bloch, &proj, &[0.0, 0.0], &fd).is_err());
}

#[test]
fn rate_table_rows_are_ordered() {
    for row in rate_table(0.7, 50.0, 101) {
        let [_, la, cla1, cla2, cla3] = row;
        assert!(cla1 <= la && la <= cla2 && cla2 <= cla3 && cla3 <= 1.0);
    }
}
