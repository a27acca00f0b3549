//! Optimizer update rules.
//!
//! Quantum methods precondition the energy gradient with the block-diagonal
//! QGT; the loss-aware rank-1 term is applied exactly through
//! Sherman–Morrison. Classical methods follow the Fisher-preconditioned
//! family with momentum, plus the SGD-RMS and Adam baselines.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, Error, Result};
use crate::metrics::{conformal_multiplier, effective_rate, ConformalKind, SigmaForm};
use crate::numkit::{check_finite, dot, RealSymMatrix, SymFactor};
use crate::qgt::BlockQGT;

pub const DEFAULT_DAMPING: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QMethod {
    Qng,
    LaQng,
    Cla2Qng,
    Cla3Qng,
}

impl QMethod {
    pub const ALL: [QMethod; 4] = [QMethod::Qng, QMethod::LaQng, QMethod::Cla2Qng, QMethod::Cla3Qng];

    pub fn as_str(self) -> &'static str {
        match self {
            QMethod::Qng => "qng",
            QMethod::LaQng => "la-qng",
            QMethod::Cla2Qng => "cla2-qng",
            QMethod::Cla3Qng => "cla3-qng",
        }
    }

    pub fn uses_xi(self) -> bool {
        self != QMethod::Qng
    }

    pub fn uses_gamma(self) -> bool {
        matches!(self, QMethod::Cla2Qng | QMethod::Cla3Qng)
    }

    fn kind(self, gamma: f64) -> ConformalKind {
        match self {
            QMethod::Qng | QMethod::LaQng => ConformalKind::la(),
            QMethod::Cla2Qng => ConformalKind::cla2(gamma),
            QMethod::Cla3Qng => ConformalKind::cla3(gamma),
        }
    }
}

impl fmt::Display for QMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown quantum method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QOptConfig {
    pub method: QMethod,
    pub eta: f64,
    pub xi: f64,
    pub gamma: f64,
    pub damping: f64,
    pub sigma_form: SigmaForm,
}

impl QOptConfig {
    pub fn new(method: QMethod, eta: f64, xi: f64, gamma: f64) -> Self {
        Self {
            method,
            eta,
            xi,
            gamma,
            damping: DEFAULT_DAMPING,
            sigma_form: SigmaForm::Inverse,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QStep {
    pub delta: Vec<f64>,
    /// `σ` used in the conformal factor (0 for QNG).
    pub sigma: f64,
    /// `Ω⁻²(σ)`
    pub multiplier: f64,
    /// Largest damping applied to any block after escalation.
    pub damping: f64,
}

/// `Δθ = −η·Ω⁻²·x` with `(gb + damping·I + ξ∇E∇Eᵀ)x = ∇E`.
///
/// With `y = (gb + damping·I)⁻¹∇E` the rank-1 solve collapses to
/// `x = y/(1 + ξ∇Eᵀy)`, so every method steps along the QNG direction.
pub fn quantum_step(cfg: &QOptConfig, gb: &BlockQGT, grad: &[f64]) -> Result<QStep> {
    ensure_dims(gb.n_params() == grad.len(), || {
        format!("QGT covers {} parameters, gradient has {}", gb.n_params(), grad.len())
    })?;
    check_finite(grad)?;
    if grad.iter().all(|&g| g == 0.0) {
        return Ok(QStep {
            delta: vec![0.0; grad.len()],
            sigma: 0.0,
            multiplier: 1.0,
            damping: cfg.damping,
        });
    }
    let mut y = Vec::with_capacity(grad.len());
    let mut damping: f64 = cfg.damping;
    let mut offset = 0;
    for block in &gb.blocks {
        let f = SymFactor::new(block, cfg.damping)?;
        damping = damping.max(f.damping());
        y.extend(f.solve(&grad[offset..offset + block.dim()]));
        offset += block.dim();
    }
    let (sigma, multiplier) = if cfg.method.uses_xi() {
        let inv = cfg.xi * dot(grad, &y);
        let sigma = match cfg.sigma_form {
            SigmaForm::Inverse => inv,
            SigmaForm::Literal => cfg.xi * gb.to_dense().quad_form(grad),
        };
        let kind = cfg.method.kind(cfg.gamma);
        let scale = 1.0 / (1.0 + inv);
        y.iter_mut().for_each(|v| *v *= scale);
        (sigma, conformal_multiplier(kind, sigma))
    } else {
        (0.0, 1.0)
    };
    let s = -cfg.eta * multiplier;
    Ok(QStep {
        delta: y.into_iter().map(|v| s * v).collect(),
        sigma,
        multiplier,
        damping,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassicalMethod {
    SgdRms,
    Adam,
    FNg,
    FLang,
    FCla2,
    FCla3,
}

impl ClassicalMethod {
    pub const ALL: [ClassicalMethod; 6] = [
        ClassicalMethod::SgdRms,
        ClassicalMethod::Adam,
        ClassicalMethod::FNg,
        ClassicalMethod::FLang,
        ClassicalMethod::FCla2,
        ClassicalMethod::FCla3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassicalMethod::SgdRms => "sgd-rms",
            ClassicalMethod::Adam => "adam",
            ClassicalMethod::FNg => "f-ng",
            ClassicalMethod::FLang => "f-lang",
            ClassicalMethod::FCla2 => "f-cla2",
            ClassicalMethod::FCla3 => "f-cla3",
        }
    }

    pub fn is_fisher(self) -> bool {
        !matches!(self, ClassicalMethod::SgdRms | ClassicalMethod::Adam)
    }

    /// Scalar applied to `−η p_t`, shared with the quantum rate algebra.
    pub fn fisher_scale(self, gamma: f64, s: f64) -> f64 {
        match self {
            ClassicalMethod::FLang => effective_rate(ConformalKind::la(), 1.0, s),
            ClassicalMethod::FCla2 => effective_rate(ConformalKind::cla2(gamma), 1.0, s),
            ClassicalMethod::FCla3 => effective_rate(ConformalKind::cla3(gamma), 1.0, s),
            _ => 1.0,
        }
    }
}

impl fmt::Display for ClassicalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassicalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassicalMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown classical method {s:?}")))
    }
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalHyper {
    pub eta: f64,
    pub beta_m: f64,
    pub beta_rms: f64,
    /// EMA coefficient of the SGD-RMS scalar `μ`.
    pub beta: f64,
    pub beta_curv: f64,
    pub xi: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// `δ̃` in `P ≈ F + δ̃I`.
    pub damping: f64,
    pub eps: f64,
    pub curv_every: u64,
    pub inv_every: u64,
}

impl Default for ClassicalHyper {
    fn default() -> Self {
        Self {
            eta: 1e-2,
            beta_m: 0.9,
            beta_rms: 0.999,
            beta: 0.9,
            beta_curv: 0.95,
            xi: 0.1,
            gamma: 0.5,
            lambda: 0.0,
            damping: 1e-3,
            eps: 1e-8,
            curv_every: 20,
            inv_every: 40,
        }
    }
}

/// Layer-block empirical Fisher with its cached damped inverse.
#[derive(Debug, Clone)]
pub struct FisherPrecond {
    pub layout: Vec<Range<usize>>,
    pub blocks: Vec<RealSymMatrix>,
    initialized: bool,
    factors: Option<Vec<SymFactor>>,
}

impl FisherPrecond {
    pub fn new(layout: Vec<Range<usize>>) -> Self {
        let blocks = layout.iter().map(|r| RealSymMatrix::zeros(r.len())).collect();
        Self {
            layout,
            blocks,
            initialized: false,
            factors: None,
        }
    }

    pub fn has_inverse(&self) -> bool {
        self.factors.is_some()
    }

    /// `P⁻¹v` with the cached factors, or `v/δ̃` before the first inversion.
    fn apply_inverse(&self, v: &[f64], damping: f64) -> Vec<f64> {
        match &self.factors {
            None => v.iter().map(|x| x / damping).collect(),
            Some(fs) => {
                let mut out = vec![0.0; v.len()];
                for (r, f) in self.layout.iter().zip(fs) {
                    out[r.clone()].copy_from_slice(&f.solve(&v[r.clone()]));
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassicalOptState {
    pub method: ClassicalMethod,
    pub hyper: ClassicalHyper,
    pub m: Vec<f64>,
    pub r: Vec<f64>,
    pub mu: f64,
    pub t: u64,
    pub precond: FisherPrecond,
}

impl ClassicalOptState {
    /// `layout` lists the parameter ranges of the preconditioner blocks.
    pub fn new(method: ClassicalMethod, hyper: ClassicalHyper, layout: Vec<Range<usize>>) -> Self {
        let n = layout.last().map_or(0, |r| r.end);
        Self {
            method,
            hyper,
            m: vec![0.0; n],
            r: vec![0.0; n],
            mu: 0.0,
            t: 0,
            precond: FisherPrecond::new(layout),
        }
    }

    pub fn n_params(&self) -> usize {
        self.m.len()
    }
}

/// Cadenced curvature update driven by per-example gradients of the data
/// loss. At `t % curv_every == 0` each block becomes
/// `β_curv F + (1 − β_curv)·mean(g gᵀ)` (the first estimate is taken as is);
/// at `t % inv_every == 0` the factors of `F + δ̃I` are refreshed.
pub fn fisher_precond_refresh(state: &mut ClassicalOptState, per_example: &[Vec<f64>]) -> Result<()> {
    let h = state.hyper;
    let t = state.t;
    if t.is_multiple_of(h.curv_every) && !per_example.is_empty() {
        let inv_n = 1.0 / per_example.len() as f64;
        let pc = &mut state.precond;
        for (block, range) in pc.blocks.iter_mut().zip(&pc.layout) {
            let mut est = RealSymMatrix::zeros(range.len());
            for g in per_example {
                ensure_dims(g.len() >= range.end, || {
                    format!("per-example gradient of length {} too short", g.len())
                })?;
                est.add_rank1(inv_n, &g[range.clone()]);
            }
            if pc.initialized {
                block.axpby(h.beta_curv, 1.0 - h.beta_curv, &est);
            } else {
                *block = est;
            }
        }
        pc.initialized = true;
    }
    if t.is_multiple_of(h.inv_every) && state.precond.initialized {
        let factors = state
            .precond
            .blocks
            .iter()
            .map(|b| SymFactor::new(b, h.damping))
            .collect::<Result<Vec<_>>>()?;
        state.precond.factors = Some(factors);
    }
    Ok(())
}

/// One update. `grad` is the gradient of the regularized loss
/// `L + (λ/2)‖θ‖²`; SGD-RMS strips the ridge term back out and applies it as
/// decoupled decay.
pub fn classical_step(state: &mut ClassicalOptState, theta: &[f64], grad: &[f64]) -> Result<Vec<f64>> {
    ensure_dims(grad.len() == state.n_params() && theta.len() == grad.len(), || {
        format!(
            "optimizer has {} parameters, got theta {} and grad {}",
            state.n_params(),
            theta.len(),
            grad.len()
        )
    })?;
    check_finite(grad)?;
    let h = state.hyper;
    state.t += 1;
    let t = state.t as i32;
    match state.method {
        ClassicalMethod::SgdRms => {
            let d: Vec<f64> = grad.iter().zip(theta).map(|(g, x)| g - h.lambda * x).collect();
            let rc = 1.0 - h.beta_rms.powi(t);
            let mut acc = 0.0;
            for i in 0..d.len() {
                state.r[i] = h.beta_rms * state.r[i] + (1.0 - h.beta_rms) * d[i] * d[i];
                state.m[i] = h.beta_m * state.m[i] + (1.0 - h.beta_m) * d[i];
                acc += d[i] * d[i] / ((state.r[i] / rc).sqrt() + h.eps);
            }
            state.mu = h.beta * state.mu + (1.0 - h.beta) * h.xi * acc;
            let mu_hat = state.mu / (1.0 - h.beta.powi(t));
            let gamma_t = 1.0 / (1.0 + mu_hat.abs());
            let mc = 1.0 - h.beta_m.powi(t);
            Ok((0..d.len())
                .map(|i| {
                    let denom = mc * ((state.r[i] / rc).sqrt() + h.eps);
                    -h.eta * gamma_t * state.m[i] / denom - h.eta * h.lambda * theta[i]
                })
                .collect())
        }
        ClassicalMethod::Adam => {
            let c1 = 1.0 - ADAM_BETA1.powi(t);
            let c2 = 1.0 - ADAM_BETA2.powi(t);
            Ok((0..grad.len())
                .map(|i| {
                    state.m[i] = ADAM_BETA1 * state.m[i] + (1.0 - ADAM_BETA1) * grad[i];
                    state.r[i] = ADAM_BETA2 * state.r[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
                    -h.eta * (state.m[i] / c1) / ((state.r[i] / c2).sqrt() + ADAM_EPS)
                })
                .collect())
        }
        method => {
            for (m, g) in state.m.iter_mut().zip(grad) {
                *m = h.beta_m * *m + (1.0 - h.beta_m) * g;
            }
            let p = state.precond.apply_inverse(&state.m, h.damping);
            let s = dot(&state.m, &p);
            let scale = -h.eta * method.fisher_scale(h.gamma, s);
            Ok(p.into_iter().map(|v| scale * v).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{solve_sym, SplitRng};
    use proptest::prelude::*;

    fn identity_qgt(blocks: usize, n: usize) -> BlockQGT {
        BlockQGT {
            blocks: vec![RealSymMatrix::identity(n); blocks],
            noisy: false,
            noise_strength: 0.0,
            epsilon: 1e-6,
        }
    }

    fn random_qgt(rng: &mut SplitRng, blocks: usize, n: usize) -> BlockQGT {
        let blocks = (0..blocks)
            .map(|_| {
                let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gaussian()).collect()).collect();
                let mut m = RealSymMatrix::zeros(n);
                for row in &a {
                    m.add_rank1(1.0 / n as f64, row);
                }
                m.add_diag(1e-2);
                m
            })
            .collect();
        BlockQGT {
            blocks,
            noisy: false,
            noise_strength: 0.0,
            epsilon: 1e-6,
        }
    }

    #[test]
    fn identity_examples() {
        let gb = identity_qgt(2, 2);
        let g = [1.0, 0.0, 0.0, 0.0];
        let qng = quantum_step(&QOptConfig::new(QMethod::Qng, 1.0, 1.0, 0.0), &gb, &g).unwrap();
        let la = quantum_step(&QOptConfig::new(QMethod::LaQng, 1.0, 1.0, 0.0), &gb, &g).unwrap();
        assert!((qng.delta[0] + 1.0).abs() < 1e-7);
        assert!((la.delta[0] + 0.5).abs() < 1e-7);
        assert!(la.delta[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_gradient_zero_step() {
        let gb = identity_qgt(2, 3);
        for m in QMethod::ALL {
            let s = quantum_step(&QOptConfig::new(m, 0.1, 0.5, 1.0), &gb, &[0.0; 6]).unwrap();
            assert!(s.delta.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn degenerate_hyperparameters_reduce_to_qng() {
        let mut rng = SplitRng::new(3);
        let gb = random_qgt(&mut rng, 3, 4);
        let g: Vec<f64> = (0..12).map(|_| rng.gaussian()).collect();
        let qng = quantum_step(&QOptConfig::new(QMethod::Qng, 0.05, 0.0, 0.0), &gb, &g).unwrap();
        for m in QMethod::ALL {
            let s = quantum_step(&QOptConfig::new(m, 0.05, 0.0, 0.0), &gb, &g).unwrap();
            assert_eq!(s.delta, qng.delta);
        }
    }

    #[test]
    fn la_step_matches_dense_solve() {
        let mut rng = SplitRng::new(4);
        let gb = random_qgt(&mut rng, 2, 3);
        let g: Vec<f64> = (0..6).map(|_| rng.gaussian()).collect();
        let cfg = QOptConfig::new(QMethod::LaQng, 1.0, 0.7, 0.0);
        let s = quantum_step(&cfg, &gb, &g).unwrap();
        let mut dense = gb.to_dense();
        dense.add_rank1(0.7, &g);
        let x = solve_sym(&dense, &g, cfg.damping).unwrap();
        for (a, b) in s.delta.iter().zip(&x) {
            assert!((a + b).abs() < 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn literal_sigma_only_changes_scale() {
        let mut rng = SplitRng::new(5);
        let gb = random_qgt(&mut rng, 2, 3);
        let g: Vec<f64> = (0..6).map(|_| rng.gaussian()).collect();
        let mut cfg = QOptConfig::new(QMethod::Cla3Qng, 1.0, 0.3, 0.8);
        let a = quantum_step(&cfg, &gb, &g).unwrap();
        cfg.sigma_form = SigmaForm::Literal;
        let b = quantum_step(&cfg, &gb, &g).unwrap();
        assert!((b.sigma - 0.3 * gb.to_dense().quad_form(&g)).abs() < 1e-12);
        let ratio = b.delta[0] / a.delta[0];
        for (x, y) in a.delta.iter().zip(&b.delta) {
            assert!((y / x - ratio).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn descent_and_parallel(seed in 0u64..500, xi in 0.0f64..2.0, gamma in 0.0f64..1.0) {
            let mut rng = SplitRng::new(seed);
            let gb = random_qgt(&mut rng, 3, 3);
            let g: Vec<f64> = (0..9).map(|_| rng.gaussian()).collect();
            let qng = quantum_step(&QOptConfig::new(QMethod::Qng, 0.1, xi, gamma), &gb, &g).unwrap();
            for m in QMethod::ALL {
                let s = quantum_step(&QOptConfig::new(m, 0.1, xi, gamma), &gb, &g).unwrap();
                prop_assert!(dot(&s.delta, &g) < 0.0);
                let cos = dot(&s.delta, &qng.delta)
                    / (dot(&s.delta, &s.delta).sqrt() * dot(&qng.delta, &qng.delta).sqrt());
                prop_assert!((cos - 1.0).abs() < 1e-10);
                match m {
                    QMethod::Cla2Qng => prop_assert!(s.multiplier >= 1.0 && s.multiplier <= gamma.exp()),
                    QMethod::Cla3Qng => prop_assert!(s.multiplier >= 1.0),
                    _ => prop_assert_eq!(s.multiplier, 1.0),
                }
            }
        }
    }

    fn hyper_example() -> ClassicalHyper {
        ClassicalHyper {
            eta: 1.0,
            beta_m: 0.9,
            beta_rms: 0.9,
            beta: 0.9,
            xi: 0.1,
            lambda: 0.0,
            eps: 0.0,
            ..ClassicalHyper::default()
        }
    }

    #[test]
    fn sgd_rms_first_step() {
        let mut st = ClassicalOptState::new(ClassicalMethod::SgdRms, hyper_example(), vec![0..1]);
        let d = classical_step(&mut st, &[0.0], &[1.0]).unwrap();
        assert!((d[0] + 1.0 / 1.1).abs() < 1e-15);
    }

    #[test]
    fn sgd_rms_decoupled_decay() {
        let h = ClassicalHyper {
            lambda: 0.5,
            eps: 1e-8,
            ..hyper_example()
        };
        let mut st = ClassicalOptState::new(ClassicalMethod::SgdRms, h, vec![0..1]);
        // data gradient zero: only the decay remains
        let d = classical_step(&mut st, &[2.0], &[1.0]).unwrap();
        assert_eq!(d[0], -1.0);
    }

    #[test]
    fn adam_first_step_is_sign() {
        let mut st = ClassicalOptState::new(ClassicalMethod::Adam, ClassicalHyper::default(), vec![0..2]);
        let d = classical_step(&mut st, &[0.0, 0.0], &[3.0, -0.2]).unwrap();
        assert!((d[0] + 0.01).abs() < 1e-9 && (d[1] - 0.01).abs() < 1e-9);
    }

    fn run_fisher(method: ClassicalMethod, gamma: f64) -> Vec<Vec<f64>> {
        let h = ClassicalHyper {
            gamma,
            ..ClassicalHyper::default()
        };
        let mut st = ClassicalOptState::new(method, h, vec![0..2, 2..3]);
        let mut rng = SplitRng::new(8);
        let mut out = Vec::new();
        for _ in 0..50 {
            let per: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.gaussian()).collect()).collect();
            let g: Vec<f64> = (0..3).map(|i| per.iter().map(|p| p[i]).sum::<f64>() / 4.0).collect();
            fisher_precond_refresh(&mut st, &per).unwrap();
            out.push(classical_step(&mut st, &[0.0; 3], &g).unwrap());
        }
        out
    }

    #[test]
    fn fisher_special_cases() {
        assert_eq!(
            run_fisher(ClassicalMethod::FCla3, 1.0),
            run_fisher(ClassicalMethod::FNg, 0.3)
        );
        assert_eq!(
            run_fisher(ClassicalMethod::FCla2, 0.0),
            run_fisher(ClassicalMethod::FLang, 0.3)
        );
    }

    #[test]
    fn refresh_cadence_and_limit() {
        let h = ClassicalHyper {
            beta_curv: 0.5,
            ..ClassicalHyper::default()
        };
        let mut st = ClassicalOptState::new(ClassicalMethod::FNg, h, vec![0..2]);
        let g = vec![vec![1.0, -2.0]];
        st.t = 3;
        fisher_precond_refresh(&mut st, &g).unwrap();
        assert_eq!(st.precond.blocks[0], RealSymMatrix::zeros(2));
        assert!(!st.precond.has_inverse());
        for k in 0..60 {
            st.t = 20 * k;
            fisher_precond_refresh(&mut st, &g).unwrap();
        }
        assert!(st.precond.blocks[0].max_abs_diff(&RealSymMatrix::outer(&g[0])) < 1e-12);
        assert!(st.precond.has_inverse());
    }

    #[test]
    fn fisher_scale_shares_rates() {
        let s = 2.5;
        assert_eq!(ClassicalMethod::FNg.fisher_scale(0.4, s), 1.0);
        assert!((ClassicalMethod::FCla2.fisher_scale(0.4, s) - (0.4 * s / (1.0 + s)).exp() / (1.0 + s)).abs() < 1e-15);
        assert!((ClassicalMethod::FCla3.fisher_scale(0.4, s) - (1.0 + s).powf(0.4 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn method_strings_roundtrip() {
        for m in QMethod::ALL {
            assert_eq!(m.as_str().parse::<QMethod>().unwrap(), m);
        }
        for m in ClassicalMethod::ALL {
            assert_eq!(m.as_str().parse::<ClassicalMethod>().unwrap(), m);
        }
        assert!("sgd".parse::<ClassicalMethod>().is_err());
    }

    #[test]
    fn non_finite_gradient() {
        let gb = identity_qgt(1, 2);
        assert!(matches!(
            quantum_step(&QOptConfig::new(QMethod::Qng, 0.1, 0.0, 0.0), &gb, &[f64::NAN, 0.0]),
            Err(Error::NonFiniteGradient(0))
        ));
    }
}
