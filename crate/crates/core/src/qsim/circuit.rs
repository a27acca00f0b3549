use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{ensure_dims, Result};
use crate::numkit::SplitRng;

/// Sub-stream indices under a circuit seed.
pub(crate) const STREAM_AXES: u64 = 0;
pub(crate) const STREAM_PARAMS: u64 = 1;
pub(crate) const STREAM_HAMILTONIAN: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Layered ansatz: `U_init = ⊗ Ry(π/4)`, then per layer single-qubit
/// rotations `R_{axes[l][q]}(θ_{l,q})` followed by CZ on the open chain
/// `(q, q+1)`.
///
/// Parameters are indexed layer-major: `θ_{l,q}` lives at `l·n_qubits + q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub axes: Vec<Vec<Axis>>,
    pub seed: u64,
}

impl CircuitSpec {
    pub fn new(axes: Vec<Vec<Axis>>, seed: u64) -> Result<Self> {
        let n_layers = axes.len();
        let n_qubits = axes.first().map_or(0, Vec::len);
        let spec = Self {
            n_qubits,
            n_layers,
            axes,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_dims(self.n_qubits >= 2, || {
            format!("need at least 2 qubits, got {}", self.n_qubits)
        })?;
        ensure_dims(self.n_layers >= 1, || "need at least one layer".into())?;
        ensure_dims(
            self.axes.len() == self.n_layers && self.axes.iter().all(|l| l.len() == self.n_qubits),
            || format!("axes must be {}x{}", self.n_layers, self.n_qubits),
        )
    }

    pub fn n_params(&self) -> usize {
        self.n_qubits * self.n_layers
    }

    #[inline]
    pub fn param_index(&self, layer: usize, qubit: usize) -> usize {
        layer * self.n_qubits + qubit
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub(crate) fn check_params(&self, theta: &[f64]) -> Result<()> {
        ensure_dims(theta.len() == self.n_params(), || {
            format!("expected {} parameters, got {}", self.n_params(), theta.len())
        })
    }

    pub(crate) fn apply_init(&self, state: &mut StateVector) {
        for q in 0..self.n_qubits {
            state.apply_rotation(q, Axis::Y, FRAC_PI_4);
        }
    }

    pub(crate) fn apply_rotations(&self, state: &mut StateVector, theta: &[f64], layer: usize) {
        for (q, &axis) in self.axes[layer].iter().enumerate() {
            state.apply_rotation(q, axis, theta[self.param_index(layer, q)]);
        }
    }

    pub(crate) fn apply_entangler(&self, state: &mut StateVector) {
        for q in 0..self.n_qubits - 1 {
            state.apply_cz(q, q + 1);
        }
    }

    pub(crate) fn apply_layer(&self, state: &mut StateVector, theta: &[f64], layer: usize) {
        self.apply_rotations(state, theta, layer);
        self.apply_entangler(state);
    }

    /// Undoes `apply_layer` (CZ is self-inverse; rotations in one layer act on
    /// distinct qubits and commute).
    pub(crate) fn undo_entangler(&self, state: &mut StateVector) {
        self.apply_entangler(state);
    }

    pub(crate) fn undo_rotations(&self, state: &mut StateVector, theta: &[f64], layer: usize) {
        for (q, &axis) in self.axes[layer].iter().enumerate() {
            state.apply_rotation(q, axis, -theta[self.param_index(layer, q)]);
        }
    }
}

pub fn sample_circuit(seed: u64, n_qubits: usize, n_layers: usize) -> Result<CircuitSpec> {
    ensure_dims(n_qubits >= 2 && n_layers >= 1, || {
        format!("need n_qubits >= 2 and n_layers >= 1, got {n_qubits} and {n_layers}")
    })?;
    let mut rng = SplitRng::with_path(seed, &[STREAM_AXES]);
    let axes = (0..n_layers)
        .map(|_| (0..n_qubits).map(|_| Axis::ALL[rng.below(3) as usize]).collect())
        .collect();
    CircuitSpec::new(axes, seed)
}

/// `θ_{l,q} = 2π·z`, `z ~ N(0, 1)`.
pub fn sample_params(seed: u64, n_qubits: usize, n_layers: usize) -> Vec<f64> {
    let mut rng = SplitRng::with_path(seed, &[STREAM_PARAMS]);
    (0..n_qubits * n_layers).map(|_| TAU * rng.gaussian()).collect()
}

/// State after `U_init` and the first `up_to_layer` layers (all layers when
/// `None`).
pub fn prepare_state(spec: &CircuitSpec, theta: &[f64], up_to_layer: Option<usize>) -> Result<StateVector> {
    spec.validate()?;
    spec.check_params(theta)?;
    let layers = up_to_layer.unwrap_or(spec.n_layers);
    ensure_dims(layers <= spec.n_layers, || {
        format!("up_to_layer {layers} exceeds {} layers", spec.n_layers)
    })?;
    let mut state = StateVector::zero(spec.n_qubits);
    spec.apply_init(&mut state);
    for l in 0..layers {
        spec.apply_layer(&mut state, theta, l);
    }
    Ok(state)
}

/// The prepared state and its exact partial derivatives `|∂_k ψ⟩` for every
/// parameter, obtained by inserting the generator `−(i/2)P` after each
/// rotation.
pub fn state_derivatives(spec: &CircuitSpec, theta: &[f64]) -> Result<(StateVector, Vec<StateVector>)> {
    let psi = prepare_state(spec, theta, None)?;
    let half_mi = Complex64::new(0.0, -0.5);
    let mut derivs = Vec::with_capacity(spec.n_params());
    let mut prefix = StateVector::zero(spec.n_qubits);
    spec.apply_init(&mut prefix);
    for l in 0..spec.n_layers {
        let mut rotated = prefix.clone();
        spec.apply_rotations(&mut rotated, theta, l);
        for (q, &axis) in spec.axes[l].iter().enumerate() {
            let mut d = rotated.clone();
            d.apply_pauli(q, axis);
            d.amplitudes_mut().iter_mut().for_each(|a| *a *= half_mi);
            spec.apply_entangler(&mut d);
            for later in (l + 1)..spec.n_layers {
                spec.apply_layer(&mut d, theta, later);
            }
            derivs.push(d);
        }
        spec.apply_layer(&mut prefix, theta, l);
    }
    Ok((psi, derivs))
}
