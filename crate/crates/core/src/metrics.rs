//! Loss-aware and conformal metric algebra.
//!
//! The loss-aware metric is the rank-1 deformation `g + ξ∇L∇Lᵀ`. Its natural
//! gradient step is the plain one scaled by `1/(1 + σ)`; conformal variants
//! multiply the step further by `Ω⁻²(σ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, Error, Result};
use crate::numkit::{dot, ComplexMatrix, RealMatrix, RealSymMatrix, SymFactor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConformalTag {
    La,
    Cla1,
    Cla2,
    Cla3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalKind {
    pub tag: ConformalTag,
    pub gamma: f64,
}

impl ConformalKind {
    pub fn la() -> Self {
        Self {
            tag: ConformalTag::La,
            gamma: 0.0,
        }
    }

    pub fn cla1(gamma: f64) -> Self {
        Self {
            tag: ConformalTag::Cla1,
            gamma,
        }
    }

    pub fn cla2(gamma: f64) -> Self {
        Self {
            tag: ConformalTag::Cla2,
            gamma,
        }
    }

    pub fn cla3(gamma: f64) -> Self {
        Self {
            tag: ConformalTag::Cla3,
            gamma,
        }
    }
}

/// Which quadratic form defines `σ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaForm {
    /// `ξ∇Lᵀ(g + damping·I)⁻¹∇L`
    #[default]
    Inverse,
    /// `ξ∇Lᵀ g ∇L`
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossAwareContext {
    pub base_metric: RealSymMatrix,
    pub grad_loss: Vec<f64>,
    pub xi: f64,
    pub kind: ConformalKind,
    pub sigma_form: SigmaForm,
}

pub fn sigma(ctx: &LossAwareContext, damping: f64) -> Result<f64> {
    ensure_dims(ctx.base_metric.dim() == ctx.grad_loss.len(), || {
        format!(
            "metric is {0}x{0}, gradient has length {1}",
            ctx.base_metric.dim(),
            ctx.grad_loss.len()
        )
    })?;
    if ctx.grad_loss.iter().all(|&g| g == 0.0) {
        return Ok(0.0);
    }
    let q = match ctx.sigma_form {
        SigmaForm::Inverse => {
            let f = SymFactor::new(&ctx.base_metric, damping)?;
            dot(&ctx.grad_loss, &f.solve(&ctx.grad_loss))
        }
        SigmaForm::Literal => ctx.base_metric.quad_form(&ctx.grad_loss),
    };
    Ok(ctx.xi * q)
}

/// `Ω⁻²(σ)`, the factor multiplying the loss-aware step.
pub fn conformal_multiplier(kind: ConformalKind, sigma: f64) -> f64 {
    let g = kind.gamma;
    match kind.tag {
        ConformalTag::La => 1.0,
        ConformalTag::Cla1 => (1.0 + sigma).powf(-g),
        ConformalTag::Cla2 => (g * sigma / (1.0 + sigma)).exp(),
        ConformalTag::Cla3 => (1.0 + sigma).powf(g),
    }
}

/// `Ω⁻²(σ)·η/(1 + σ)`
pub fn effective_rate(kind: ConformalKind, eta: f64, sigma: f64) -> f64 {
    conformal_multiplier(kind, sigma) * eta / (1.0 + sigma)
}

/// Rows `(σ, LA, CLA1, CLA2, CLA3)` of effective rates at `η = 1` on an even
/// grid `0..=sigma_max`.
pub fn rate_table(gamma: f64, sigma_max: f64, points: usize) -> Vec<[f64; 5]> {
    let n = points.max(2);
    (0..n)
        .map(|k| {
            let s = sigma_max * k as f64 / (n - 1) as f64;
            [
                s,
                effective_rate(ConformalKind::la(), 1.0, s),
                effective_rate(ConformalKind::cla1(gamma), 1.0, s),
                effective_rate(ConformalKind::cla2(gamma), 1.0, s),
                effective_rate(ConformalKind::cla3(gamma), 1.0, s),
            ]
        })
        .collect()
}

/// Central-difference settings for the state-family tensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDiff {
    pub step: f64,
    pub richardson: bool,
}

impl FiniteDiff {
    pub const DEFAULT_STEP: f64 = 1e-4;

    pub fn central(step: f64) -> Self {
        Self {
            step,
            richardson: false,
        }
    }

    pub fn with_richardson(self) -> Self {
        Self {
            richardson: true,
            ..self
        }
    }

    fn derivative<F>(&self, f: &F, theta: &[f64], k: usize) -> Vec<Complex64>
    where
        F: Fn(&[f64]) -> Vec<Complex64>,
    {
        let central = |h: f64| {
            let mut tp = theta.to_vec();
            tp[k] += h;
            let mut tm = theta.to_vec();
            tm[k] -= h;
            let (p, m) = (f(&tp), f(&tm));
            p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>()
        };
        let d = central(self.step);
        if !self.richardson {
            return d;
        }
        let half = central(0.5 * self.step);
        half.iter().zip(&d).map(|(a, b)| (4.0 * a - b) / 3.0).collect()
    }
}

impl Default for FiniteDiff {
    fn default() -> Self {
        Self::central(Self::DEFAULT_STEP)
    }
}

fn braket(a: &[Complex64], op: &ComplexMatrix, b: &[Complex64]) -> Complex64 {
    crate::numkit::cdot(a, &op.matvec(b))
}

struct Family {
    psi: Vec<Complex64>,
    dpsi: Vec<Vec<Complex64>>,
    loss: f64,
}

fn evaluate<F>(state: &F, a: &ComplexMatrix, theta: &[f64], fd: &FiniteDiff) -> Result<Family>
where
    F: Fn(&[f64]) -> Vec<Complex64>,
{
    ensure_dims(a.is_square(), || "operator must be square".into())?;
    let psi = state(theta);
    ensure_dims(psi.len() == a.rows(), || {
        format!("state length {} vs operator {}", psi.len(), a.rows())
    })?;
    let dev = a.hermitian_deviation();
    if dev > crate::numkit::HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let loss = braket(&psi, a, &psi).re;
    if loss.abs() < 1e-12 {
        return Err(Error::ZeroLoss(loss));
    }
    let dpsi = (0..theta.len()).map(|k| fd.derivative(state, theta, k)).collect();
    Ok(Family { psi, dpsi, loss })
}

fn fs_entry(f: &Family, i: usize, j: usize) -> Complex64 {
    use crate::numkit::cdot;
    cdot(&f.dpsi[i], &f.dpsi[j]) - cdot(&f.dpsi[i], &f.psi) * cdot(&f.psi, &f.dpsi[j])
}

/// Loss-aware quantum geometric tensor
/// `FS + (1/L)⟨∂_iΨ|A|∂_jΨ⟩ − (1/L²)⟨∂_iΨ|A|Ψ⟩⟨Ψ|A|∂_jΨ⟩`, `L = ⟨Ψ|A|Ψ⟩`.
///
/// `state` maps parameters to a normalized state vector; derivatives are
/// taken by central differences.
pub fn la_qgt_tensor<F>(state: F, a: &ComplexMatrix, theta: &[f64], fd: &FiniteDiff) -> Result<ComplexMatrix>
where
    F: Fn(&[f64]) -> Vec<Complex64>,
{
    let f = evaluate(&state, a, theta, fd)?;
    let k = theta.len();
    let a_psi: Vec<Complex64> = (0..k).map(|i| braket(&f.dpsi[i], a, &f.psi)).collect();
    let mut out = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let v = fs_entry(&f, i, j) + braket(&f.dpsi[i], a, &f.dpsi[j]) / f.loss
                - a_psi[i] * a_psi[j].conj() / (f.loss * f.loss);
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Loss-aware Berry curvature
/// `ω_ij + (1/L)⟨∂_[iΨ|A|∂_j]Ψ⟩ − (1/L²)∂_[iL⟨Ψ|A|∂_j]Ψ⟩`, with `ω = Im FS` and
/// brackets taking the antisymmetrized imaginary part. Equals
/// `Im la_qgt_tensor` for a θ-independent `A`.
pub fn la_berry<F>(state: F, a: &ComplexMatrix, theta: &[f64], fd: &FiniteDiff) -> Result<RealMatrix>
where
    F: Fn(&[f64]) -> Vec<Complex64>,
{
    let f = evaluate(&state, a, theta, fd)?;
    let k = theta.len();
    let loss_at = |t: &[f64]| {
        let s = state(t);
        braket(&s, a, &s).re
    };
    let dloss: Vec<f64> = (0..k)
        .map(|i| {
            let d = fd.derivative(&|t: &[f64]| vec![Complex64::new(loss_at(t), 0.0)], theta, i);
            d[0].re
        })
        .collect();
    let conn: Vec<f64> = (0..k).map(|j| braket(&f.psi, a, &f.dpsi[j]).im).collect();
    let mut out = RealMatrix::zeros(k, k);
    for i in 0..k {
        for j in (i + 1)..k {
            let omega = 0.5 * (fs_entry(&f, i, j).im - fs_entry(&f, j, i).im);
            let op = 0.5 * (braket(&f.dpsi[i], a, &f.dpsi[j]).im - braket(&f.dpsi[j], a, &f.dpsi[i]).im);
            let mixed = 0.5 * (dloss[i] * conn[j] - dloss[j] * conn[i]);
            let v = omega + op / f.loss - mixed / (f.loss * f.loss);
            out.set(i, j, v);
            out.set(j, i, -v);
        }
    }
    Ok(out)
}
