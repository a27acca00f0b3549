//! Statevector simulation of the layered ansatz, random gapped Hamiltonians,
//! and exact energies and gradients.

mod circuit;
mod energy;
mod hamiltonian;
mod state;

pub use circuit::{prepare_state, sample_circuit, sample_params, state_derivatives, Axis, CircuitSpec};
pub use energy::{energy, energy_and_grad, grad_energy};
pub use hamiltonian::{sample_hamiltonian, GappedHamiltonian, DEFAULT_GAP, GROUND_ENERGY};
pub use state::StateVector;
