//! Information geometry of the normal family under a Gaussian loss kernel.
//!
//! Points are canonical coordinates `(θ¹, θ²)` with `θ² < 0`; the loss
//! `L(θ²) = √(2/Δ)`, `Δ = 2 − κ²θ²`, depends on `θ²` only. Five metrics are
//! compared: the Fisher metric, its loss-aware rank-1 deformation
//! `FIM + diag(0, Σ)`, and three conformal rescalings `e^{C(θ²)}·LA`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::RealSymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFamilyPoint {
    pub theta1: f64,
    pub theta2: f64,
}

impl ExpFamilyPoint {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        let p = Self { theta1, theta2 };
        p.check()?;
        Ok(p)
    }

    /// `θ¹ = μ/δ²`, `θ² = −1/(2δ²)`
    pub fn from_mu_delta(mu: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::DomainError(format!("delta must be positive, got {delta}")));
        }
        Self::new(mu / (delta * delta), -0.5 / (delta * delta))
    }

    fn check(&self) -> Result<()> {
        if self.theta2 < 0.0 && self.theta1.is_finite() && self.theta2.is_finite() {
            Ok(())
        } else {
            Err(Error::DomainError(format!(
                "need theta2 < 0, got ({}, {})",
                self.theta1, self.theta2
            )))
        }
    }
}

/// `(μ, δ)` of a point.
pub fn to_mu_delta(p: &ExpFamilyPoint) -> Result<(f64, f64)> {
    p.check()?;
    let delta = (-0.5 / p.theta2).sqrt();
    Ok((p.theta1 * delta * delta, delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub kappa: f64,
    pub eta: f64,
    pub gamma: f64,
}

impl KernelParams {
    pub fn new(kappa: f64, eta: f64, gamma: f64) -> Self {
        Self { kappa, eta, gamma }
    }

    /// `Δ = 2 − κ²θ²`
    pub fn delta_of(&self, theta2: f64) -> f64 {
        2.0 - self.kappa * self.kappa * theta2
    }

    /// `Σ = κ⁴/(2Δ³)`
    pub fn sigma(&self, theta2: f64) -> f64 {
        self.kappa.powi(4) / (2.0 * self.delta_of(theta2).powi(3))
    }

    /// `Σ′ = 3κ⁶/(2Δ⁴)`
    pub fn sigma_prime(&self, theta2: f64) -> f64 {
        1.5 * self.kappa.powi(6) / self.delta_of(theta2).powi(4)
    }

    /// `Σ″ = 6κ⁸/Δ⁵`
    pub fn sigma_second(&self, theta2: f64) -> f64 {
        6.0 * self.kappa.powi(8) / self.delta_of(theta2).powi(5)
    }

    /// `Ω(θ²) = 2η√(πκ⁶/Δ³)`
    pub fn omega_flow(&self, theta2: f64) -> f64 {
        2.0 * self.eta * (PI * self.kappa.powi(6) / self.delta_of(theta2).powi(3)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    Fim,
    La,
    Cla1,
    Cla2,
    Cla3,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 5] = [
        FamilyTag::Fim,
        FamilyTag::La,
        FamilyTag::Cla1,
        FamilyTag::Cla2,
        FamilyTag::Cla3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::Fim => "fim",
            FamilyTag::La => "la",
            FamilyTag::Cla1 => "cla1",
            FamilyTag::Cla2 => "cla2",
            FamilyTag::Cla3 => "cla3",
        }
    }
}

impl std::str::FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyTag::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown metric family {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricFamily {
    pub tag: FamilyTag,
    pub params: KernelParams,
}

impl MetricFamily {
    pub fn new(tag: FamilyTag, params: KernelParams) -> Self {
        Self { tag, params }
    }
}

pub fn fim(p: &ExpFamilyPoint) -> Result<RealSymMatrix> {
    p.check()?;
    let (t1, t2) = (p.theta1, p.theta2);
    let mut g = RealSymMatrix::zeros(2);
    g.set(0, 0, -0.5 / t2);
    g.set(0, 1, t1 / (2.0 * t2 * t2));
    g.set(1, 1, 0.5 / (t2 * t2) - t1 * t1 / (2.0 * t2.powi(3)));
    Ok(g)
}

fn check_theta2(theta2: f64, kappa: f64) -> Result<()> {
    if theta2 < 0.0 && kappa > 0.0 && theta2.is_finite() && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "need theta2 < 0 and kappa > 0, got theta2 = {theta2}, kappa = {kappa}"
        )))
    }
}

/// `L = √(2/Δ)`
pub fn loss(theta2: f64, kappa: f64) -> Result<f64> {
    check_theta2(theta2, kappa)?;
    Ok((2.0 / (2.0 - kappa * kappa * theta2)).sqrt())
}

/// `∂₂L = κ²/(√2 Δ^{3/2})`
pub fn loss_grad(theta2: f64, kappa: f64) -> Result<f64> {
    check_theta2(theta2, kappa)?;
    let d = 2.0 - kappa * kappa * theta2;
    Ok(kappa * kappa / (std::f64::consts::SQRT_2 * d.powf(1.5)))
}

/// `σ̃ = g^{FIM ij}∂_iL∂_jL = 2(θ²)²Σ`
pub fn sigma_tilde(params: &KernelParams, theta2: f64) -> f64 {
    2.0 * theta2 * theta2 * params.sigma(theta2)
}

/// Conformal exponent `C(θ²)` and its first two derivatives; the metric is
/// `e^C · LA`.
pub fn conformal_exponent(fam: &MetricFamily, theta2: f64) -> (f64, f64, f64) {
    let k = &fam.params;
    let t = theta2;
    let s = sigma_tilde(k, t);
    let s1 = 4.0 * t * k.sigma(t) + 2.0 * t * t * k.sigma_prime(t);
    let s2 = 4.0 * k.sigma(t) + 8.0 * t * k.sigma_prime(t) + 2.0 * t * t * k.sigma_second(t);
    let g = k.gamma;
    let u = 1.0 + s;
    let log_form = (g * u.ln(), g * s1 / u, g * (s2 * u - s1 * s1) / (u * u));
    match fam.tag {
        FamilyTag::Fim | FamilyTag::La => (0.0, 0.0, 0.0),
        FamilyTag::Cla1 => log_form,
        FamilyTag::Cla2 => (
            -g * s / u,
            -g * s1 / (u * u),
            -g * (s2 / (u * u) - 2.0 * s1 * s1 / u.powi(3)),
        ),
        FamilyTag::Cla3 => (-log_form.0, -log_form.1, -log_form.2),
    }
}

pub fn metric(fam: &MetricFamily, p: &ExpFamilyPoint) -> Result<RealSymMatrix> {
    let mut g = fim(p)?;
    if fam.tag == FamilyTag::Fim {
        return Ok(g);
    }
    check_theta2(p.theta2, fam.params.kappa)?;
    g.set(1, 1, g.get(1, 1) + fam.params.sigma(p.theta2));
    let (c, _, _) = conformal_exponent(fam, p.theta2);
    if c != 0.0 {
        g.scale(c.exp());
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RicciMode {
    ClosedForm,
    Numeric,
}

/// Relative finite-difference step used by [`RicciMode::Numeric`]; the
/// absolute step is `RICCI_FD_STEP·|θ²|`, the metric's local length scale.
/// Results at `h` and `2h` are Richardson-combined.
pub const RICCI_FD_STEP: f64 = 3e-3;

pub fn ricci_scalar(fam: &MetricFamily, p: &ExpFamilyPoint, mode: RicciMode) -> Result<f64> {
    match mode {
        RicciMode::ClosedForm => ricci_closed_form(fam, p),
        RicciMode::Numeric => {
            let h = RICCI_FD_STEP * p.theta2.abs();
            let fine = ricci_numeric(|q| metric(fam, q), p, h)?;
            let coarse = ricci_numeric(|q| metric(fam, q), p, 2.0 * h)?;
            Ok((4.0 * fine - coarse) / 3.0)
        }
    }
}

fn ricci_closed_form(fam: &MetricFamily, p: &ExpFamilyPoint) -> Result<f64> {
    p.check()?;
    if fam.tag == FamilyTag::Fim {
        return Ok(-1.0);
    }
    check_theta2(p.theta2, fam.params.kappa)?;
    let k = &fam.params;
    let t = p.theta2;
    let a = 2.0 * t * t * k.sigma(t);
    let b = 2.0 * t.powi(3) * k.sigma_prime(t);
    if fam.tag == FamilyTag::La {
        return Ok((a + b - 1.0) / (1.0 + a).powi(2));
    }
    let (c, c1, c2) = conformal_exponent(fam, t);
    Ok((-c).exp() / (1.0 + a).powi(2) * (a + b - 2.0 * t * t * c2 * (1.0 + a) - t * c1 * (3.0 + a - b) - 1.0))
}

/// Loss-aware curvature as a function of the scale `β = κ/δ` alone.
pub fn ricci_la_scale(beta: f64) -> Result<f64> {
    let p = ExpFamilyPoint::from_mu_delta(0.0, 1.0)?;
    ricci_closed_form(&MetricFamily::new(FamilyTag::La, KernelParams::new(beta, 1.0, 0.0)), &p)
}

/// Scalar curvature of a 2D metric field from central differences:
/// `R = 2R₁₂₁₂/det g` with Christoffels built from first derivatives and
/// `R₁₂₁₂` from second derivatives.
pub fn ricci_numeric<F>(metric_at: F, p: &ExpFamilyPoint, h: f64) -> Result<f64>
where
    F: Fn(&ExpFamilyPoint) -> Result<RealSymMatrix>,
{
    let at = |d1: f64, d2: f64| {
        metric_at(&ExpFamilyPoint {
            theta1: p.theta1 + d1,
            theta2: p.theta2 + d2,
        })
    };
    let shift = |k: usize, s: f64| if k == 0 { (s, 0.0) } else { (0.0, s) };
    let g0 = at(0.0, 0.0)?;
    // dg[c][a][b] = ∂_c g_ab
    let mut dg = [[[0.0; 2]; 2]; 2];
    for (c, slot) in dg.iter_mut().enumerate() {
        let (x, y) = shift(c, h);
        let (gp, gm) = (at(x, y)?, at(-x, -y)?);
        for a in 0..2 {
            for b in 0..2 {
                slot[a][b] = (gp.get(a, b) - gm.get(a, b)) / (2.0 * h);
            }
        }
    }
    // ddg[c][d][a][b] = ∂_c∂_d g_ab
    let mut ddg = [[[[0.0; 2]; 2]; 2]; 2];
    for c in 0..2 {
        for d in c..2 {
            let v = if c == d {
                let (x, y) = shift(c, h);
                let (gp, gm) = (at(x, y)?, at(-x, -y)?);
                [[0usize, 0usize], [0, 1], [1, 1]]
                    .map(|[a, b]| (gp.get(a, b) - 2.0 * g0.get(a, b) + gm.get(a, b)) / (h * h))
            } else {
                let (pp, pm, mp, mm) = (at(h, h)?, at(h, -h)?, at(-h, h)?, at(-h, -h)?);
                [[0usize, 0usize], [0, 1], [1, 1]]
                    .map(|[a, b]| (pp.get(a, b) - pm.get(a, b) - mp.get(a, b) + mm.get(a, b)) / (4.0 * h * h))
            };
            for (idx, [a, b]) in [[0usize, 0usize], [0, 1], [1, 1]].into_iter().enumerate() {
                ddg[c][d][a][b] = v[idx];
                ddg[c][d][b][a] = v[idx];
                ddg[d][c][a][b] = v[idx];
                ddg[d][c][b][a] = v[idx];
            }
        }
    }
    let det = g0.get(0, 0) * g0.get(1, 1) - g0.get(0, 1).powi(2);
    let ginv = [
        [g0.get(1, 1) / det, -g0.get(0, 1) / det],
        [-g0.get(0, 1) / det, g0.get(0, 0) / det],
    ];
    // first kind Γ_{e,bc} = ½(∂_b g_ec + ∂_c g_eb − ∂_e g_bc), then raise e
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for e in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                gamma[e][b][c] = (0..2)
                    .map(|f| 0.5 * ginv[e][f] * (dg[b][f][c] + dg[c][f][b] - dg[f][b][c]))
                    .sum();
            }
        }
    }
    let (a, b, c, d) = (0, 1, 0, 1);
    let mut r = 0.5 * (ddg[b][c][a][d] + ddg[a][d][b][c] - ddg[b][d][a][c] - ddg[a][c][b][d]);
    for e in 0..2 {
        for f in 0..2 {
            r += g0.get(e, f) * (gamma[e][b][c] * gamma[f][a][d] - gamma[e][b][d] * gamma[f][a][c]);
        }
    }
    Ok(2.0 * r / det)
}

/// Normalization of the loss kernel entering the flow gradient.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelNorm {
    /// Unit-mass kernel: `L = √(2/Δ)`.
    #[default]
    Unit,
    /// Kernel without its `1/(√(2π)κ)` normalization, `L = √(2π)κ·√(2/Δ)`;
    /// its FIM flow is `dθ²/dt = −(θ²)²Ω` with `Ω = 2η√(πκ⁶/Δ³)`.
    Bare,
}

impl KernelNorm {
    fn scale(self, kappa: f64) -> f64 {
        match self {
            KernelNorm::Unit => 1.0,
            KernelNorm::Bare => (2.0 * PI).sqrt() * kappa,
        }
    }
}

/// `dθ/dt = −η g⁻¹∇L`
pub fn flow_velocity(fam: &MetricFamily, p: &ExpFamilyPoint, norm: KernelNorm) -> Result<[f64; 2]> {
    let g = metric(fam, p)?;
    let dl = loss_grad(p.theta2, fam.params.kappa)? * norm.scale(fam.params.kappa);
    let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1).powi(2);
    let e = fam.params.eta;
    Ok([e * g.get(0, 1) / det * dl, -e * g.get(0, 0) / det * dl])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub point: ExpFamilyPoint,
}

/// Fixed-step RK4 integration of the natural-gradient flow, sampled at every
/// step (including `t = 0`).
pub fn ng_flow(
    fam: &MetricFamily,
    p0: ExpFamilyPoint,
    t_end: f64,
    dt: f64,
    norm: KernelNorm,
) -> Result<Vec<FlowSample>> {
    p0.check()?;
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(Error::DomainError(format!(
            "need dt > 0 and t_end >= 0, got {dt}, {t_end}"
        )));
    }
    let steps = (t_end / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut p = p0;
    out.push(FlowSample { t: 0.0, point: p });
    let off = |p: &ExpFamilyPoint, k: [f64; 2], s: f64| ExpFamilyPoint {
        theta1: p.theta1 + s * k[0],
        theta2: p.theta2 + s * k[1],
    };
    for i in 1..=steps {
        let k1 = flow_velocity(fam, &p, norm)?;
        let k2 = flow_velocity(fam, &off(&p, k1, 0.5 * dt), norm)?;
        let k3 = flow_velocity(fam, &off(&p, k2, 0.5 * dt), norm)?;
        let k4 = flow_velocity(fam, &off(&p, k3, dt), norm)?;
        p = ExpFamilyPoint {
            theta1: p.theta1 + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            theta2: p.theta2 + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        };
        p.check()?;
        out.push(FlowSample {
            t: i as f64 * dt,
            point: p,
        });
    }
    Ok(out)
}

fn raw_time(omega: f64, kappa: f64, eta: f64) -> f64 {
    let r = (1.0 + omega).sqrt();
    let arccoth = 0.5 * ((r + 1.0) / (r - 1.0)).ln();
    ((2.0 * omega - 1.0) / omega * r - 3.0 * arccoth) / (eta * (2.0 * PI).sqrt() * kappa)
}

/// Antiderivative of the FIM flow time along `θ²`, with
/// `ω = −κ²θ²/2` and the constant fixed so that `T = 0` at `ω = 1`.
pub fn implicit_time(theta2: f64, kappa: f64, eta: f64) -> Result<f64> {
    check_theta2(theta2, kappa)?;
    if !(eta > 0.0) {
        return Err(Error::DomainError(format!("eta must be positive, got {eta}")));
    }
    let omega = -0.5 * kappa * kappa * theta2;
    Ok(raw_time(omega, kappa, eta) - raw_time(1.0, kappa, eta))
}

/// Closed-form metric in `(μ, δ)` coordinates, diagonal:
/// `ds² = e^C[(dμ² + 2dδ²)/δ² + 4κ⁴/(4δ²+κ²)³ dδ²]` (loss term absent for FIM).
pub fn line_element(fam: &MetricFamily, mu: f64, delta: f64) -> Result<RealSymMatrix> {
    let p = ExpFamilyPoint::from_mu_delta(mu, delta)?;
    let d2 = delta * delta;
    let k = fam.params.kappa;
    let mut g = RealSymMatrix::from_diag(&[1.0 / d2, 2.0 / d2]);
    if fam.tag != FamilyTag::Fim {
        let q = (4.0 * d2 + k * k).powi(3);
        g.set(1, 1, g.get(1, 1) + 4.0 * k.powi(4) / q);
        let (c, _, _) = conformal_exponent(fam, p.theta2);
        g.scale(c.exp());
    }
    Ok(g)
}

/// `J = ∂(θ¹, θ²)/∂(μ, δ)`, row-major.
pub fn jacobian_mu_delta(mu: f64, delta: f64) -> [[f64; 2]; 2] {
    [
        [1.0 / (delta * delta), -2.0 * mu / delta.powi(3)],
        [0.0, 1.0 / delta.powi(3)],
    ]
}

/// `Jᵀ g_θ J`: the canonical-coordinate metric expressed in `(μ, δ)`.
pub fn pullback_mu_delta(fam: &MetricFamily, mu: f64, delta: f64) -> Result<RealSymMatrix> {
    let g = metric(fam, &ExpFamilyPoint::from_mu_delta(mu, delta)?)?;
    let j = jacobian_mu_delta(mu, delta);
    let mut out = RealSymMatrix::zeros(2);
    for a in 0..2 {
        for b in a..2 {
            let mut s = 0.0;
            for i in 0..2 {
                for k in 0..2 {
                    s += j[i][a] * g.get(i, k) * j[k][b];
                }
            }
            out.set(a, b, s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(tag: FamilyTag, kappa: f64, gamma: f64) -> MetricFamily {
        MetricFamily::new(tag, KernelParams::new(kappa, 1.0, gamma))
    }

    #[test]
    fn fim_example_and_domain() {
        let g = fim(&ExpFamilyPoint::new(0.0, -0.5).unwrap()).unwrap();
        assert_eq!(g.entries(), &[1.0, 0.0, 0.0, 2.0]);
        assert!(ExpFamilyPoint::new(1.0, 0.0).is_err());
        assert!(loss(0.1, 1.0).is_err());
    }

    #[test]
    fn la_example() {
        let p = ExpFamilyPoint::new(0.0, -0.5).unwrap();
        let g = metric(&fam(FamilyTag::La, 1.0, 0.0), &p).unwrap();
        assert!((g.get(1, 1) - 2.032).abs() < 1e-15);
        assert_eq!(g.get(0, 0), 1.0);
    }

    #[test]
    fn loss_examples() {
        assert!((loss(-2.0, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((loss(-2.0, 1e-8).unwrap() - 1.0).abs() < 1e-12);
        let k = KernelParams::new(1.7, 1.0, 0.0);
        let d = loss_grad(-0.3, 1.7).unwrap();
        assert!((d * d - k.sigma(-0.3)).abs() < 1e-15);
    }

    #[test]
    fn ricci_fim_is_minus_one() {
        let f = fam(FamilyTag::Fim, 1.0, 0.0);
        for &(t1, t2) in &[(0.0, -0.5), (1.3, -2.0), (-0.4, -0.1)] {
            let p = ExpFamilyPoint::new(t1, t2).unwrap();
            let r = ricci_scalar(&f, &p, RicciMode::Numeric).unwrap();
            assert!((r + 1.0).abs() < 1e-5, "{r}");
        }
    }

    #[test]
    fn la_reference_value() {
        // independent high-precision evaluation at θ = (0.3, −0.7), κ = 1.3
        let p = ExpFamilyPoint::new(0.3, -0.7).unwrap();
        let r = ricci_scalar(&fam(FamilyTag::La, 1.3, 0.0), &p, RicciMode::ClosedForm).unwrap();
        assert!((r + 0.923_129_439_93).abs() < 1e-10, "{r}");
    }

    #[test]
    fn la_curvature_depends_on_scale_only() {
        for &(kappa, delta) in &[(1.3, 0.8), (0.4, 0.3), (2.0, 2.5)] {
            let p = ExpFamilyPoint::from_mu_delta(0.7, delta).unwrap();
            let r = ricci_scalar(&fam(FamilyTag::La, kappa, 0.0), &p, RicciMode::ClosedForm).unwrap();
            assert!((r - ricci_la_scale(kappa / delta).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_zero_collapses() {
        let p = ExpFamilyPoint::new(0.2, -0.9).unwrap();
        let la = metric(&fam(FamilyTag::La, 1.1, 0.0), &p).unwrap();
        for tag in [FamilyTag::Cla1, FamilyTag::Cla2, FamilyTag::Cla3] {
            assert_eq!(metric(&fam(tag, 1.1, 0.0), &p).unwrap(), la);
        }
    }

    #[test]
    fn implicit_time_derivative() {
        let (kappa, eta) = (1.2, 0.7);
        let params = KernelParams::new(kappa, eta, 0.0);
        for &t2 in &[-0.3, -1.0, -4.0] {
            let h = 1e-6;
            let d =
                (implicit_time(t2 + h, kappa, eta).unwrap() - implicit_time(t2 - h, kappa, eta).unwrap()) / (2.0 * h);
            let expected = -1.0 / (t2 * t2 * params.omega_flow(t2));
            assert!(
                (d - expected).abs() < 1e-6 * expected.abs().max(1.0),
                "{d} vs {expected}"
            );
        }
        let a = implicit_time(-3.0, kappa, 1.0).unwrap() - implicit_time(-1.0, kappa, 1.0).unwrap();
        let b = implicit_time(-3.0, kappa, 2.0).unwrap() - implicit_time(-1.0, kappa, 2.0).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn mu_delta_roundtrip() {
        let p = ExpFamilyPoint::from_mu_delta(-1.4, 0.6).unwrap();
        let (mu, delta) = to_mu_delta(&p).unwrap();
        assert!((mu + 1.4).abs() < 1e-12 && (delta - 0.6).abs() < 1e-12);
    }

    #[test]
    fn kappa_to_zero_line_element() {
        let la = line_element(&fam(FamilyTag::La, 1e-9, 0.0), 0.3, 0.9).unwrap();
        let f = line_element(&fam(FamilyTag::Fim, 1e-9, 0.0), 0.3, 0.9).unwrap();
        assert!(la.max_abs_diff(&f) < 1e-12);
    }
}
