use super::circuit::{prepare_state, CircuitSpec};
use super::hamiltonian::GappedHamiltonian;
use crate::error::{ensure_dims, Result};

fn check(spec: &CircuitSpec, h: &GappedHamiltonian) -> Result<()> {
    ensure_dims(spec.n_qubits == h.n_qubits, || {
        format!("circuit has {} qubits, Hamiltonian {}", spec.n_qubits, h.n_qubits)
    })
}

/// `E(θ) = ⟨ψ(θ)|H|ψ(θ)⟩`
pub fn energy(spec: &CircuitSpec, theta: &[f64], h: &GappedHamiltonian) -> Result<f64> {
    check(spec, h)?;
    let psi = prepare_state(spec, theta, None)?;
    Ok(h.expectation(&psi))
}

pub fn grad_energy(spec: &CircuitSpec, theta: &[f64], h: &GappedHamiltonian) -> Result<Vec<f64>> {
    energy_and_grad(spec, theta, h).map(|(_, g)| g)
}

/// Energy and its exact gradient from one forward pass and one adjoint sweep.
///
/// With `|λ⟩ = H|ψ⟩` carried backwards alongside `|ψ⟩`, the derivative with
/// respect to a rotation `exp(−iθP/2)` is `Im⟨λ|P|ψ⟩` evaluated just after
/// the rotation.
pub fn energy_and_grad(spec: &CircuitSpec, theta: &[f64], h: &GappedHamiltonian) -> Result<(f64, Vec<f64>)> {
    check(spec, h)?;
    let mut psi = prepare_state(spec, theta, None)?;
    let mut lambda = h.apply(&psi);
    let e = psi.inner(&lambda).re;
    let mut grad = vec![0.0; spec.n_params()];
    for l in (0..spec.n_layers).rev() {
        spec.undo_entangler(&mut psi);
        spec.undo_entangler(&mut lambda);
        for (q, &axis) in spec.axes[l].iter().enumerate() {
            grad[spec.param_index(l, q)] = lambda.pauli_matrix_element(&psi, q, axis).im;
        }
        spec.undo_rotations(&mut psi, theta, l);
        spec.undo_rotations(&mut lambda, theta, l);
    }
    Ok((e, grad))
}
