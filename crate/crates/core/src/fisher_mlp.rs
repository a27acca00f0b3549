//! Small MLP classifier on synthetic Gaussian clusters, trained with the
//! classical optimizer family.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, Error, Result};
use crate::numkit::SplitRng;
use crate::optim::{classical_step, fisher_precond_refresh, ClassicalHyper, ClassicalMethod, ClassicalOptState};

const STREAM_INIT: u64 = 0;
const STREAM_BATCHES: u64 = 1;

const STREAM_MEANS: u64 = 0;
const STREAM_TRAIN: u64 = 1;
const STREAM_VAL: u64 = 2;
const STREAM_MIXING: u64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub widths: Vec<usize>,
    pub seed: u64,
}

impl MlpSpec {
    pub const DEFAULT_WIDTHS: [usize; 4] = [20, 16, 16, 4];

    pub fn new(widths: Vec<usize>, seed: u64) -> Result<Self> {
        ensure_dims(widths.len() >= 3 && widths.iter().all(|&w| w > 0), || {
            format!("need input, at least one hidden layer and output, got {widths:?}")
        })?;
        Ok(Self { widths, seed })
    }

    pub fn default_task(seed: u64) -> Self {
        Self {
            widths: Self::DEFAULT_WIDTHS.to_vec(),
            seed,
        }
    }

    pub fn n_layers(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn n_params(&self) -> usize {
        self.widths.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
    }

    /// Parameter range of each layer: weights (`out × in`, row-major) then
    /// biases.
    pub fn layout(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.widths
            .windows(2)
            .map(|w| {
                let r = start..start + (w[0] + 1) * w[1];
                start = r.end;
                r
            })
            .collect()
    }

    /// Weights `N(0, 1/fan_in)`, biases zero.
    pub fn init_params(&self) -> Vec<f64> {
        let mut rng = SplitRng::with_path(self.seed, &[STREAM_INIT]);
        let mut theta = Vec::with_capacity(self.n_params());
        for w in self.widths.windows(2) {
            let sd = 1.0 / (w[0] as f64).sqrt();
            theta.extend((0..w[0] * w[1]).map(|_| sd * rng.gaussian()));
            theta.extend(std::iter::repeat_n(0.0, w[1]));
        }
        theta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDataset {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_classes: usize,
    pub seed: u64,
    /// Row-major `n_samples × n_features`.
    pub features: Vec<f64>,
    pub labels: Vec<usize>,
}

impl SyntheticDataset {
    pub const DEFAULT_FEATURES: usize = 20;
    pub const DEFAULT_CLASSES: usize = 4;
    pub const DEFAULT_TRAIN: usize = 4096;
    pub const DEFAULT_VAL: usize = 1024;
    /// Standard deviation of each class-mean coordinate (unit noise).
    pub const DEFAULT_MEAN_SCALE: f64 = 0.3;
    /// Condition number of the default feature mixing.
    pub const DEFAULT_CONDITION: f64 = 30.0;

    /// `n_samples` points with balanced labels around class means shared by
    /// every split drawn from the same `seed`.
    pub fn generate(
        seed: u64,
        split: u64,
        n_samples: usize,
        n_features: usize,
        n_classes: usize,
        mean_scale: f64,
    ) -> Result<Self> {
        ensure_dims(n_samples > 0 && n_features > 0 && n_classes >= 2, || {
            format!("bad dataset shape {n_samples}x{n_features}, {n_classes} classes")
        })?;
        let mut mrng = SplitRng::with_path(seed, &[STREAM_MEANS]);
        let means: Vec<f64> = (0..n_classes * n_features)
            .map(|_| mean_scale * mrng.gaussian())
            .collect();
        let mut rng = SplitRng::with_path(seed, &[split]);
        let mut labels: Vec<usize> = (0..n_samples).map(|i| i % n_classes).collect();
        rng.shuffle(&mut labels);
        let mut features = Vec::with_capacity(n_samples * n_features);
        for &c in &labels {
            features.extend((0..n_features).map(|j| means[c * n_features + j] + rng.gaussian()));
        }
        Ok(Self {
            n_samples,
            n_features,
            n_classes,
            seed,
            features,
            labels,
        })
    }

    /// Default train and validation splits.
    pub fn default_splits(seed: u64) -> (Self, Self) {
        let mk = |split, n| {
            Self::generate(
                seed,
                split,
                n,
                Self::DEFAULT_FEATURES,
                Self::DEFAULT_CLASSES,
                Self::DEFAULT_MEAN_SCALE,
            )
            .expect("default shape is valid")
            .mixed(Self::DEFAULT_CONDITION)
        };
        (mk(STREAM_TRAIN, Self::DEFAULT_TRAIN), mk(STREAM_VAL, Self::DEFAULT_VAL))
    }

    /// Applies `x ↦ Q diag(s) Qᵀ x` to every row, with `Q` a random rotation
    /// and `s` log-spaced from `condition^{-1/2}` to `condition^{1/2}`. The
    /// mixing depends only on the seed, so splits stay consistent. This gives
    /// the loss correlated, ill-conditioned curvature.
    pub fn mixed(mut self, condition: f64) -> Self {
        let n = self.n_features;
        if condition == 1.0 || n < 2 {
            return self;
        }
        let mut rng = SplitRng::with_path(self.seed, &[STREAM_MIXING]);
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
        while q.len() < n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
            for b in &q {
                let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                v.iter_mut().for_each(|x| *x /= norm);
                q.push(v);
            }
        }
        let scales: Vec<f64> = (0..n)
            .map(|k| condition.powf(k as f64 / (n - 1) as f64 - 0.5))
            .collect();
        for row in self.features.chunks_mut(n) {
            let coeff: Vec<f64> = q
                .iter()
                .zip(&scales)
                .map(|(b, s)| s * b.iter().zip(row.iter()).map(|(x, y)| x * y).sum::<f64>())
                .collect();
            for (i, x) in row.iter_mut().enumerate() {
                *x = q.iter().zip(&coeff).map(|(b, c)| b[i] * c).sum();
            }
        }
        self
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    /// Mean cross-entropy plus `(λ/2)‖θ‖²`.
    pub loss: f64,
    pub grad: Vec<f64>,
    pub accuracy: f64,
    /// Data-loss gradient of each example (only when requested).
    pub per_example: Vec<Vec<f64>>,
}

const GELU_C: f64 = 0.797_884_560_802_865_4; // √(2/π)

fn gelu(x: f64) -> (f64, f64) {
    let u = GELU_C * (x + 0.044715 * x.powi(3));
    let t = u.tanh();
    let du = GELU_C * (1.0 + 3.0 * 0.044715 * x * x);
    (0.5 * x * (1.0 + t), 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du)
}

struct Net<'a> {
    spec: &'a MlpSpec,
    theta: &'a [f64],
    layout: Vec<Range<usize>>,
}

impl Net<'_> {
    fn weight(&self, l: usize, o: usize, i: usize) -> f64 {
        self.theta[self.layout[l].start + o * self.spec.widths[l] + i]
    }

    fn bias(&self, l: usize, o: usize) -> f64 {
        let w = &self.spec.widths;
        self.theta[self.layout[l].start + w[l] * w[l + 1] + o]
    }

    /// Returns pre-activations and activations of every layer.
    fn forward(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let w = &self.spec.widths;
        let last = self.spec.n_layers() - 1;
        let mut pre = Vec::with_capacity(w.len());
        let mut act = vec![x.to_vec()];
        for l in 0..=last {
            let z: Vec<f64> = (0..w[l + 1])
                .map(|o| self.bias(l, o) + (0..w[l]).map(|i| self.weight(l, o, i) * act[l][i]).sum::<f64>())
                .collect();
            let a = if l == last {
                z.clone()
            } else {
                z.iter().map(|&v| gelu(v).0).collect()
            };
            pre.push(z);
            act.push(a);
        }
        (pre, act)
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x).1.pop().unwrap()
    }

    /// Cross-entropy of one example, accumulating its gradient into `g`.
    fn backward(&self, x: &[f64], label: usize, g: &mut [f64]) -> (f64, bool) {
        let w = &self.spec.widths;
        let (pre, act) = self.forward(x);
        let logits = act.last().unwrap();
        let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = logits.iter().map(|v| (v - m).exp()).sum();
        let loss = z.ln() + m - logits[label];
        let argmax = logits
            .iter()
            .enumerate()
            .fold(0, |b, (i, v)| if *v > logits[b] { i } else { b });
        let mut delta: Vec<f64> = logits.iter().map(|v| (v - m).exp() / z).collect();
        delta[label] -= 1.0;
        for l in (0..self.spec.n_layers()).rev() {
            let base = self.layout[l].start;
            for o in 0..w[l + 1] {
                for i in 0..w[l] {
                    g[base + o * w[l] + i] += delta[o] * act[l][i];
                }
                g[base + w[l] * w[l + 1] + o] += delta[o];
            }
            if l > 0 {
                delta = (0..w[l])
                    .map(|i| {
                        let back: f64 = (0..w[l + 1]).map(|o| self.weight(l, o, i) * delta[o]).sum();
                        back * gelu(pre[l - 1][i]).1
                    })
                    .collect();
            }
        }
        (loss, argmax == label)
    }
}

/// Loss, gradient and accuracy of `L̃ = mean CE + (λ/2)‖θ‖²` over the rows
/// `batch` of `data`.
pub fn forward_loss_grad(
    spec: &MlpSpec,
    theta: &[f64],
    data: &SyntheticDataset,
    batch: &[usize],
    lambda: f64,
    per_example: bool,
) -> Result<LossGrad> {
    ensure_dims(theta.len() == spec.n_params(), || {
        format!("expected {} parameters, got {}", spec.n_params(), theta.len())
    })?;
    ensure_dims(!batch.is_empty(), || "empty batch".into())?;
    ensure_dims(
        data.n_features == spec.widths[0] && data.n_classes == *spec.widths.last().unwrap(),
        || "dataset shape does not match the network".into(),
    )?;
    let net = Net {
        spec,
        theta,
        layout: spec.layout(),
    };
    let n = spec.n_params();
    let inv = 1.0 / batch.len() as f64;
    let mut grad = vec![0.0; n];
    let mut examples = Vec::new();
    let (mut loss, mut correct) = (0.0, 0usize);
    for &i in batch {
        let (l, ok) = if per_example {
            let mut g = vec![0.0; n];
            let r = net.backward(data.row(i), data.labels[i], &mut g);
            grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
            examples.push(g);
            r
        } else {
            net.backward(data.row(i), data.labels[i], &mut grad)
        };
        loss += l;
        correct += ok as usize;
    }
    let sq: f64 = theta.iter().map(|t| t * t).sum();
    let loss = loss * inv + 0.5 * lambda * sq;
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss);
    }
    for (g, t) in grad.iter_mut().zip(theta) {
        *g = *g * inv + lambda * t;
    }
    Ok(LossGrad {
        loss,
        grad,
        accuracy: correct as f64 * inv,
        per_example: examples,
    })
}

pub fn accuracy(spec: &MlpSpec, theta: &[f64], data: &SyntheticDataset) -> f64 {
    let net = Net {
        spec,
        theta,
        layout: spec.layout(),
    };
    let correct = (0..data.n_samples)
        .filter(|&i| {
            let z = net.logits(data.row(i));
            let best = z.iter().enumerate().fold(0, |b, (k, v)| if *v > z[b] { k } else { b });
            best == data.labels[i]
        })
        .count();
    correct as f64 / data.n_samples as f64
}

/// Shuffled epochs of fixed-size minibatches; the last partial batch of an
/// epoch is dropped.
#[derive(Debug, Clone)]
pub struct MinibatchSampler {
    n: usize,
    batch: usize,
    seed: u64,
    epoch: u64,
    order: Vec<usize>,
    cursor: usize,
}

impl MinibatchSampler {
    pub fn new(n: usize, batch: usize, seed: u64) -> Self {
        let batch = batch.clamp(1, n);
        let mut s = Self {
            n,
            batch,
            seed,
            epoch: 0,
            order: Vec::new(),
            cursor: 0,
        };
        s.reshuffle();
        s
    }

    fn reshuffle(&mut self) {
        self.order = (0..self.n).collect();
        SplitRng::with_path(self.seed, &[STREAM_BATCHES, self.epoch]).shuffle(&mut self.order);
        self.cursor = 0;
    }

    pub fn next_batch(&mut self) -> Vec<usize> {
        if self.cursor + self.batch > self.n {
            self.epoch += 1;
            self.reshuffle();
        }
        let b = self.order[self.cursor..self.cursor + self.batch].to_vec();
        self.cursor += self.batch;
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_steps: usize,
    pub val_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 128,
            max_steps: 200,
            val_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub train_loss: f64,
    pub val_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub method: ClassicalMethod,
    pub hyper: ClassicalHyper,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
    /// A complete trajectory with finite losses throughout.
    pub valid: bool,
}

impl RunTrace {
    pub fn min_train_loss(&self) -> f64 {
        self.rows.iter().map(|r| r.train_loss).fold(f64::INFINITY, f64::min)
    }

    pub fn best_val_accuracy(&self) -> f64 {
        self.rows.iter().filter_map(|r| r.val_accuracy).fold(0.0, f64::max)
    }
}

/// Runs `max_steps` updates; row `s` records the minibatch loss at the
/// parameters before update `s` (row `max_steps` is evaluated without a
/// further update) and the validation accuracy every `val_every` steps.
/// Network initialization follows `spec.seed`; batch order follows `seed`.
pub fn train_run(
    spec: &MlpSpec,
    train: &SyntheticDataset,
    val: &SyntheticDataset,
    method: ClassicalMethod,
    hyper: ClassicalHyper,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<RunTrace> {
    let mut theta = spec.init_params();
    let mut state = ClassicalOptState::new(method, hyper, spec.layout());
    let mut sampler = MinibatchSampler::new(train.n_samples, cfg.batch_size, seed);
    let mut rows = Vec::with_capacity(cfg.max_steps + 1);
    let mut valid = true;
    for s in 0..=cfg.max_steps {
        let batch = sampler.next_batch();
        let lg = match forward_loss_grad(spec, &theta, train, &batch, hyper.lambda, method.is_fisher()) {
            Ok(lg) => lg,
            Err(_) => {
                valid = false;
                break;
            }
        };
        let val_accuracy = (s % cfg.val_every.max(1) == 0).then(|| accuracy(spec, &theta, val));
        rows.push(TraceRow {
            step: s,
            train_loss: lg.loss,
            val_accuracy,
        });
        if s == cfg.max_steps {
            break;
        }
        if method.is_fisher() && fisher_precond_refresh(&mut state, &lg.per_example).is_err() {
            valid = false;
            break;
        }
        match classical_step(&mut state, &theta, &lg.grad) {
            Ok(d) => theta.iter_mut().zip(&d).for_each(|(t, v)| *t += v),
            Err(_) => {
                valid = false;
                break;
            }
        }
        if theta.iter().any(|t| !t.is_finite()) {
            valid = false;
            break;
        }
    }
    valid &= rows.len() == cfg.max_steps + 1;
    Ok(RunTrace {
        method,
        hyper,
        seed,
        rows,
        valid,
    })
}

/// First validation checkpoint step with accuracy `≥ target`; `None` if the
/// target is never reached.
pub fn time_to_threshold(trace: &RunTrace, target: f64) -> Option<usize> {
    trace
        .rows
        .iter()
        .find(|r| r.val_accuracy.is_some_and(|a| a >= target))
        .map(|r| r.step)
}

/// The `k` valid runs with the lowest minimum training loss, best first.
pub fn select_top_k(runs: &[RunTrace], k: usize) -> Vec<&RunTrace> {
    let mut valid: Vec<&RunTrace> = runs.iter().filter(|r| r.valid).collect();
    valid.sort_by(|a, b| a.min_train_loss().total_cmp(&b.min_train_loss()));
    valid.truncate(k);
    valid
}

/// Seeded random search for one classical method. `η` is log-uniform in
/// `[1e-3, 1]`, `γ` uniform in `[0, 4]` for the conformal methods, `ξ`
/// log-uniform in `[1e-3, 1e-1]` for SGD-RMS and `δ̃` log-uniform in
/// `[1e-3, 1]` for the Fisher methods. The objective is the mean minimum
/// training loss over `run_seeds` (invalid runs count as `+∞`).
pub fn tune_classical(
    spec: &MlpSpec,
    train: &SyntheticDataset,
    val: &SyntheticDataset,
    method: ClassicalMethod,
    base: ClassicalHyper,
    cfg: &TrainConfig,
    n_trials: usize,
    run_seeds: &[u64],
    search_seed: u64,
) -> Result<(ClassicalHyper, Vec<(ClassicalHyper, f64)>)> {
    let mut rng = SplitRng::with_path(search_seed, &[method as u64]);
    let mut table = Vec::with_capacity(n_trials);
    for _ in 0..n_trials.max(1) {
        let mut h = base;
        h.eta = rng.log_uniform(1e-3, 1.0);
        let gamma = rng.uniform_range(0.0, 4.0);
        let xi = rng.log_uniform(1e-3, 1e-1);
        let damping = rng.log_uniform(1e-3, 1.0);
        if matches!(method, ClassicalMethod::FCla2 | ClassicalMethod::FCla3) {
            h.gamma = gamma;
        }
        if method == ClassicalMethod::SgdRms {
            h.xi = xi;
        }
        if method.is_fisher() {
            h.damping = damping;
        }
        let mut total = 0.0;
        for &s in run_seeds {
            let tr = train_run(spec, train, val, method, h, cfg, s)?;
            total += if tr.valid { tr.min_train_loss() } else { f64::INFINITY };
        }
        table.push((h, total / run_seeds.len().max(1) as f64));
    }
    let best = table
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|t| t.0)
        .expect("at least one trial");
    Ok((best, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_count() {
        let s = MlpSpec::default_task(0);
        assert_eq!(s.n_params(), 21 * 16 + 17 * 16 + 17 * 4);
        assert_eq!(s.layout().last().unwrap().end, s.n_params());
        assert_eq!(s.init_params().len(), s.n_params());
        assert!(MlpSpec::new(vec![3, 2], 0).is_err());
    }

    #[test]
    fn uniform_logits_give_log_classes() {
        let s = MlpSpec::default_task(0);
        let (train, _) = SyntheticDataset::default_splits(1);
        let lg = forward_loss_grad(&s, &vec![0.0; s.n_params()], &train, &[0, 1, 2, 3], 0.0, false).unwrap();
        assert!((lg.loss - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn balanced_labels() {
        let (train, val) = SyntheticDataset::default_splits(3);
        for d in [&train, &val] {
            let mut counts = vec![0usize; d.n_classes];
            d.labels.iter().for_each(|&l| counts[l] += 1);
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1);
            assert!(d.features.iter().all(|x| x.is_finite()));
        }
        assert_eq!(SyntheticDataset::default_splits(3).0, train);
    }

    #[test]
    fn mixing_stretch_is_bounded_by_the_condition() {
        let raw = SyntheticDataset::generate(5, 1, 64, 6, 2, 1.0).unwrap();
        let mixed = raw.clone().mixed(16.0);
        let norm = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..raw.n_samples {
            let ratio = norm(mixed.row(i)) / norm(raw.row(i));
            assert!((0.25 - 1e-12..=4.0 + 1e-12).contains(&ratio));
        }
        assert_eq!(raw.clone().mixed(1.0), raw);
    }

    #[test]
    fn gelu_derivative() {
        for &x in &[-2.0, -0.3, 0.0, 0.7, 3.0] {
            let h = 1e-6;
            let fd = (gelu(x + h).0 - gelu(x - h).0) / (2.0 * h);
            assert!((fd - gelu(x).1).abs() < 1e-8);
        }
    }

    #[test]
    fn sampler_covers_epoch() {
        let mut s = MinibatchSampler::new(10, 3, 4);
        let mut seen: Vec<usize> = (0..3).flat_map(|_| s.next_batch()).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 9);
    }
}
