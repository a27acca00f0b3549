//! Ensemble benchmark harness: instances, the optimization loop with
//! sustained-streak convergence, random-search tuning, trimmed means,
//! Dolan–Moré profiles and win rates, and CSV/JSON persistence.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, Error, Result};
use crate::numkit::{ComplexMatrix, SplitRng};
use crate::optim::{quantum_step, QMethod, QOptConfig};
use crate::qgt::{apply_noise, block_qgt, DEFAULT_EPSILON};
use crate::qsim::{
    energy_and_grad, sample_circuit, sample_hamiltonian, sample_params, CircuitSpec, GappedHamiltonian, DEFAULT_GAP,
};

pub const DEFAULT_MAX_ITERS: usize = 12000;
pub const DEFAULT_TOL: f64 = 1e-11;
pub const DEFAULT_WINDOW: usize = 400;
pub const PROFILE_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_TRIM: f64 = 0.2;

/// Thresholds whose sustained-streak start is recorded for every run.
pub const RECORDED_THRESHOLDS: [f64; 12] = [
    1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12,
];

const STREAM_NOISE: u64 = 3;

/// Formats with 17 significant digits; non-finite values as `inf`, `-inf`,
/// `nan`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn fmt_iters(x: Option<usize>) -> String {
    x.map_or_else(|| "inf".into(), |v| v.to_string())
}

fn parse_iters(s: &str) -> Result<Option<usize>> {
    match s.trim() {
        "inf" | "" => Ok(None),
        v => v
            .parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("bad iteration count {v:?}"))),
    }
}

fn same_threshold(a: f64, b: f64) -> bool {
    (a / b - 1.0).abs() < 1e-9
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_circuits: usize,
    pub n_qubits: usize,
    pub n_layers: usize,
    pub gap: f64,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub fn new(n_circuits: usize, n_qubits: usize, n_layers: usize, master_seed: u64) -> Self {
        Self {
            n_circuits,
            n_qubits,
            n_layers,
            gap: DEFAULT_GAP,
            master_seed,
        }
    }

    pub fn instance_seed(&self, index: usize) -> u64 {
        SplitRng::with_path(self.master_seed, &[index as u64]).derived_seed()
    }

    pub fn instances(&self) -> Result<Vec<Instance>> {
        (0..self.n_circuits)
            .map(|i| Instance::generate(i, self.instance_seed(i), self.n_qubits, self.n_layers, self.gap))
            .collect()
    }
}

/// One benchmark problem. Only the 4×4 Hamiltonian block is stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub circuit: CircuitSpec,
    pub local_hamiltonian: ComplexMatrix,
    pub theta0: Vec<f64>,
}

impl Instance {
    pub fn generate(index: usize, seed: u64, n_qubits: usize, n_layers: usize, gap: f64) -> Result<Self> {
        Ok(Self {
            index,
            seed,
            circuit: sample_circuit(seed, n_qubits, n_layers)?,
            local_hamiltonian: sample_hamiltonian(seed, n_qubits, gap)?.local,
            theta0: sample_params(seed, n_qubits, n_layers),
        })
    }

    pub fn hamiltonian(&self) -> Result<GappedHamiltonian> {
        GappedHamiltonian::from_local(self.circuit.n_qubits, self.local_hamiltonian.clone(), self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub spec: EnsembleSpec,
    pub instances: Vec<Instance>,
}

impl EnsembleFile {
    pub fn generate(spec: EnsembleSpec) -> Result<Self> {
        Ok(Self {
            instances: spec.instances()?,
            spec,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut s = String::new();
        std::fs::File::open(path)?.read_to_string(&mut s)?;
        Ok(serde_json::from_str(&s)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// `ς`; zero disables noise.
    pub strength: f64,
    pub epsilon: f64,
    /// Reuse one noise draw for every iteration instead of redrawing.
    pub fixed: bool,
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self {
            strength: 0.0,
            epsilon: DEFAULT_EPSILON,
            fixed: false,
        }
    }

    pub fn with_strength(strength: f64) -> Self {
        Self {
            strength,
            ..Self::noiseless()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub max_iters: usize,
    pub tol: f64,
    pub window: usize,
    /// Energy is kept every `trace_every` iterations.
    pub trace_every: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            window: DEFAULT_WINDOW,
            trace_every: 100,
        }
    }
}

/// First start of a run of `window` consecutive checks below `tol`.
#[derive(Debug, Clone, Copy)]
struct Streak {
    tol: f64,
    window: usize,
    start: Option<usize>,
    found: Option<usize>,
}

impl Streak {
    fn new(tol: f64, window: usize) -> Self {
        Self {
            tol,
            window,
            start: None,
            found: None,
        }
    }

    fn update(&mut self, iter: usize, err: f64) {
        if self.found.is_some() {
            return;
        }
        if err < self.tol {
            let s = *self.start.get_or_insert(iter);
            if iter + 1 - s >= self.window {
                self.found = Some(s);
            }
        } else {
            self.start = None;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub circuit_index: usize,
    pub seed: u64,
    pub method: QMethod,
    pub eta: f64,
    pub xi: f64,
    pub gamma: f64,
    pub noise: f64,
    /// Start of the first qualifying streak (1-based); `None` is +∞.
    pub iterations: Option<usize>,
    pub converged: bool,
    pub final_rel_error: f64,
    pub wall_time_s: f64,
    pub e_exact: f64,
    /// Streak starts at each of [`RECORDED_THRESHOLDS`].
    pub threshold_iters: Vec<Option<usize>>,
    pub energy_trace: Vec<f64>,
    pub failure: Option<String>,
}

impl RunRecord {
    /// Iterations to a sustained error below `threshold`, if recorded.
    pub fn iters_at(&self, threshold: f64) -> Result<Option<usize>> {
        RECORDED_THRESHOLDS
            .iter()
            .position(|&t| same_threshold(t, threshold))
            .map(|k| self.threshold_iters[k])
            .ok_or_else(|| Error::Parse(format!("threshold {threshold:e} is not recorded")))
    }

    /// Iterations with unconverged runs counted as `max_iters`.
    pub fn capped_iterations(&self, max_iters: usize) -> f64 {
        self.iterations.map_or(max_iters as f64, |v| v.min(max_iters) as f64)
    }
}

/// One optimization run from `inst.theta0`. Iteration `k` (1-based) checks
/// the relative energy error at the current parameters and then takes a
/// step. Solver failures end the run unconverged with a reason.
pub fn run_one(
    inst: &Instance,
    h: &GappedHamiltonian,
    cfg: &QOptConfig,
    noise: &NoiseConfig,
    limits: &Limits,
) -> RunRecord {
    let clock = Instant::now();
    let spec = &inst.circuit;
    let mut theta = inst.theta0.clone();
    let noise_base = SplitRng::with_path(inst.seed, &[STREAM_NOISE]);
    let mut noise_rng = noise_base.clone();
    let mut main = Streak::new(limits.tol, limits.window);
    let mut marks: Vec<Streak> = RECORDED_THRESHOLDS
        .iter()
        .map(|&t| Streak::new(t, limits.window))
        .collect();
    let mut trace = Vec::new();
    let mut failure = None;
    let mut last_err = f64::NAN;
    let e0 = h.e0;
    for k in 1..=limits.max_iters {
        let (e, grad) = match energy_and_grad(spec, &theta, h) {
            Ok(v) => v,
            Err(err) => {
                failure = Some(err.to_string());
                break;
            }
        };
        let err = (e - e0).abs() / e0.abs();
        last_err = err;
        if !err.is_finite() {
            failure = Some(Error::NonFiniteLoss.to_string());
            break;
        }
        if (k - 1) % limits.trace_every.max(1) == 0 {
            trace.push(e);
        }
        main.update(k, err);
        marks.iter_mut().for_each(|s| s.update(k, err));
        if main.found.is_some() {
            break;
        }
        let step = block_qgt(spec, &theta).and_then(|gb| {
            let gb = if noise.strength > 0.0 {
                if noise.fixed {
                    noise_rng = noise_base.clone();
                }
                apply_noise(&gb, noise.strength, noise.epsilon, &mut noise_rng)
            } else {
                gb
            };
            quantum_step(cfg, &gb, &grad)
        });
        match step {
            Ok(s) => theta.iter_mut().zip(&s.delta).for_each(|(t, d)| *t += d),
            Err(err) => {
                failure = Some(err.to_string());
                break;
            }
        }
    }
    RunRecord {
        circuit_index: inst.index,
        seed: inst.seed,
        method: cfg.method,
        eta: cfg.eta,
        xi: cfg.xi,
        gamma: cfg.gamma,
        noise: noise.strength,
        iterations: main.found,
        converged: main.found.is_some(),
        final_rel_error: last_err,
        wall_time_s: clock.elapsed().as_secs_f64(),
        e_exact: e0,
        threshold_iters: marks.iter().map(|s| s.found).collect(),
        energy_trace: trace,
        failure,
    }
}

/// Runs every instance in parallel; output order follows `instances`.
pub fn run_ensemble(
    instances: &[Instance],
    cfg: &QOptConfig,
    noise: &NoiseConfig,
    limits: &Limits,
) -> Result<Vec<RunRecord>> {
    instances
        .par_iter()
        .map(|inst| Ok(run_one(inst, &inst.hamiltonian()?, cfg, noise, limits)))
        .collect()
}

fn runs_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "circuit_index",
        "method",
        "eta",
        "xi",
        "gamma",
        "noise",
        "iterations",
        "converged",
        "final_rel_error",
        "wall_time_s",
        "seed",
        "e_exact",
        "failure",
    ]
    .map(String::from)
    .to_vec();
    h.extend(RECORDED_THRESHOLDS.iter().map(|t| format!("iters_at_{t:e}")));
    h
}

pub fn write_runs_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(runs_header())?;
    for r in records {
        let mut row = vec![
            r.circuit_index.to_string(),
            r.method.to_string(),
            fmt_f64(r.eta),
            fmt_f64(r.xi),
            fmt_f64(r.gamma),
            fmt_f64(r.noise),
            fmt_iters(r.iterations),
            r.converged.to_string(),
            fmt_f64(r.final_rel_error),
            fmt_f64(r.wall_time_s),
            r.seed.to_string(),
            fmt_f64(r.e_exact),
            r.failure.clone().unwrap_or_default(),
        ];
        row.extend(r.threshold_iters.iter().map(|&v| fmt_iters(v)));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a runs table; energy traces are not stored in CSV and come back
/// empty.
pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name:?}")))
    };
    let names = runs_header();
    let idx: Vec<usize> = names.iter().map(|n| col(n)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |k: usize| &row[idx[k]];
        let int = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer {s:?}")));
        out.push(RunRecord {
            circuit_index: int(f(0))? as usize,
            method: f(1).parse()?,
            eta: parse_f64(f(2))?,
            xi: parse_f64(f(3))?,
            gamma: parse_f64(f(4))?,
            noise: parse_f64(f(5))?,
            iterations: parse_iters(f(6))?,
            converged: f(7) == "true",
            final_rel_error: parse_f64(f(8))?,
            wall_time_s: parse_f64(f(9))?,
            seed: int(f(10))?,
            e_exact: parse_f64(f(11))?,
            failure: Some(f(12).to_string()).filter(|s| !s.is_empty()),
            threshold_iters: (0..RECORDED_THRESHOLDS.len())
                .map(|k| parse_iters(f(13 + k)))
                .collect::<Result<_>>()?,
            energy_trace: Vec::new(),
        });
    }
    Ok(out)
}

pub fn save_runs(records: &[RunRecord], path: &Path) -> Result<()> {
    write_runs_csv(records, std::fs::File::create(path)?)
}

pub fn load_runs(path: &Path) -> Result<Vec<RunRecord>> {
    read_runs_csv(std::fs::File::open(path)?)
}

/// How a trimming proportion `p` is split between the tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TrimConvention {
    /// `floor(p/2 · n)` from each tail.
    #[default]
    Total,
    /// `floor(p · n)` from each tail.
    EachTail,
}

impl fmt::Display for TrimConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrimConvention::Total => "total",
            TrimConvention::EachTail => "each-tail",
        })
    }
}

impl FromStr for TrimConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(TrimConvention::Total),
            "each-tail" => Ok(TrimConvention::EachTail),
            _ => Err(Error::Parse(format!("unknown trim convention {s:?}"))),
        }
    }
}

pub fn trimmed_mean(xs: &[f64], proportion: f64, conv: TrimConvention) -> Result<f64> {
    let per_tail = match conv {
        TrimConvention::Total => proportion / 2.0,
        TrimConvention::EachTail => proportion,
    };
    // guard against products like 0.1·30 landing just below an integer
    let k = (per_tail * xs.len() as f64 + 1e-9).floor() as usize;
    if 2 * k >= xs.len() {
        return Err(Error::EmptyAfterTrim {
            len: xs.len(),
            removed: (2 * k).min(xs.len()),
        });
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let kept = &v[k..v.len() - k];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

/// Per-circuit times of each method at one threshold; `None` means unsolved.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTable {
    pub methods: Vec<String>,
    pub circuits: Vec<usize>,
    /// `times[c][m]`
    pub times: Vec<Vec<Option<f64>>>,
}

impl TimeTable {
    pub fn new(methods: Vec<String>, circuits: Vec<usize>, times: Vec<Vec<Option<f64>>>) -> Result<Self> {
        ensure_dims(
            times.len() == circuits.len() && times.iter().all(|r| r.len() == methods.len()),
            || "time table shape does not match its labels".into(),
        )?;
        Ok(Self {
            methods,
            circuits,
            times,
        })
    }

    /// Methods in order of first appearance; each (circuit, method) pair must
    /// occur once. A circuit missing a method counts as unsolved.
    pub fn from_records(records: &[RunRecord], threshold: f64) -> Result<Self> {
        let mut methods: Vec<String> = Vec::new();
        let mut circuits: Vec<usize> = Vec::new();
        let mut cells: HashMap<(usize, usize), Option<f64>> = HashMap::new();
        for r in records {
            let name = r.method.to_string();
            let m = methods.iter().position(|x| *x == name).unwrap_or_else(|| {
                methods.push(name);
                methods.len() - 1
            });
            if !circuits.contains(&r.circuit_index) {
                circuits.push(r.circuit_index);
            }
            let t = r.iters_at(threshold)?.map(|v| v as f64);
            ensure_dims(cells.insert((r.circuit_index, m), t).is_none(), || {
                format!("circuit {} has two runs of {}", r.circuit_index, r.method)
            })?;
        }
        circuits.sort_unstable();
        let times = circuits
            .iter()
            .map(|&c| {
                (0..methods.len())
                    .map(|m| cells.get(&(c, m)).copied().flatten())
                    .collect()
            })
            .collect();
        Self::new(methods, circuits, times)
    }

    fn solved_rows(&self) -> Result<Vec<&Vec<Option<f64>>>> {
        let rows: Vec<_> = self.times.iter().filter(|r| r.iter().any(Option::is_some)).collect();
        if rows.is_empty() {
            Err(Error::NoSolvedInstances)
        } else {
            Ok(rows)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub method: String,
    /// Every finite performance ratio seen in the table, ascending.
    pub taus: Vec<f64>,
    pub fractions: Vec<f64>,
}

impl ProfileCurve {
    /// `ρ(τ)`; zero below the first breakpoint.
    pub fn at(&self, tau: f64) -> f64 {
        self.taus
            .iter()
            .zip(&self.fractions)
            .take_while(|(t, _)| **t <= tau)
            .last()
            .map_or(0.0, |(_, f)| *f)
    }
}

/// Performance profiles over circuits solved by at least one method; a
/// method that misses a circuit has ratio +∞ there.
pub fn dolan_more(table: &TimeTable) -> Result<Vec<ProfileCurve>> {
    let rows = table.solved_rows()?;
    let ratios: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let best = r.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
            r.iter()
                .map(|t| match t {
                    Some(t) if *t == best => 1.0,
                    Some(t) => t / best,
                    None => f64::INFINITY,
                })
                .collect()
        })
        .collect();
    let mut taus: Vec<f64> = ratios.iter().flatten().cloned().filter(|r| r.is_finite()).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let n = rows.len() as f64;
    Ok(table
        .methods
        .iter()
        .enumerate()
        .map(|(m, name)| ProfileCurve {
            method: name.clone(),
            fractions: taus
                .iter()
                .map(|&tau| ratios.iter().filter(|r| r[m] <= tau).count() as f64 / n)
                .collect(),
            taus: taus.clone(),
        })
        .collect())
}

/// Fraction of solved circuits on which each method is fastest; exact ties
/// share the win.
pub fn win_rate(table: &TimeTable) -> Result<Vec<f64>> {
    let rows = table.solved_rows()?;
    let mut wins = vec![0.0; table.methods.len()];
    for r in &rows {
        let best = r.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
        let winners: Vec<usize> = (0..r.len()).filter(|&m| r[m] == Some(best)).collect();
        for &m in &winners {
            wins[m] += 1.0 / winners.len() as f64;
        }
    }
    Ok(wins.into_iter().map(|w| w / rows.len() as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinRatePoint {
    pub threshold: f64,
    pub methods: Vec<String>,
    /// `None` when no circuit is solved at this threshold.
    pub rates: Option<Vec<f64>>,
    pub n_solved: usize,
}

pub fn win_rate_curve(records: &[RunRecord], thresholds: &[f64]) -> Result<Vec<WinRatePoint>> {
    thresholds
        .iter()
        .map(|&thr| {
            let table = TimeTable::from_records(records, thr)?;
            let rates = match win_rate(&table) {
                Ok(r) => Some(r),
                Err(Error::NoSolvedInstances) => None,
                Err(e) => return Err(e),
            };
            Ok(WinRatePoint {
                threshold: thr,
                n_solved: table.solved_rows().map_or(0, |r| r.len()),
                methods: table.methods,
                rates,
            })
        })
        .collect()
}

/// `a:b:log` gives every decade from `a` to `b`; `a:b:log:n` gives `n`
/// log-spaced points; anything else is a comma-separated list.
pub fn parse_thresholds(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() >= 3 && parts[2] == "log" {
        let (a, b) = (parse_f64(parts[0])?, parse_f64(parts[1])?);
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Parse(format!("log range needs positive ends: {s:?}")));
        }
        let (la, lb) = (a.log10(), b.log10());
        let n = match parts.get(3) {
            Some(n) => n
                .parse()
                .map_err(|_| Error::Parse(format!("bad point count in {s:?}")))?,
            None => (lb - la).abs().round() as usize + 1,
        };
        if n == 1 {
            return Ok(vec![a]);
        }
        return Ok((0..n)
            .map(|i| {
                let e = la + (lb - la) * i as f64 / (n - 1) as f64;
                // snap to decades so recorded thresholds match exactly
                if (e - e.round()).abs() < 1e-9 {
                    10f64.powi(e.round() as i32)
                } else {
                    10f64.powf(e)
                }
            })
            .collect());
    }
    s.split(',').map(parse_f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub eta: (f64, f64),
    pub xi: (f64, f64),
    pub gamma: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            eta: (1e-3, 1e-1),
            xi: (1e-3, 1e-1),
            gamma: (0.0, 4.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub method: QMethod,
    pub eta: f64,
    pub xi: f64,
    pub gamma: f64,
    pub objective: f64,
    /// Per-circuit iterations with unconverged runs counted as `max_iters`.
    pub iterations: Vec<f64>,
    pub n_converged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: Trial,
    pub trials: Vec<Trial>,
    pub trim: f64,
    pub convention: TrimConvention,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneOptions {
    pub n_trials: usize,
    pub space: SearchSpace,
    pub noise: NoiseConfig,
    pub limits: Limits,
    pub trim: f64,
    pub convention: TrimConvention,
    pub seed: u64,
}

impl TuneOptions {
    pub fn new(n_trials: usize, seed: u64) -> Self {
        Self {
            n_trials,
            space: SearchSpace::default(),
            noise: NoiseConfig::noiseless(),
            limits: Limits::default(),
            trim: DEFAULT_TRIM,
            convention: TrimConvention::Total,
            seed,
        }
    }
}

/// Draws trial `index` for `method`; parameters a method ignores are zero.
pub fn draw_trial(method: QMethod, space: &SearchSpace, seed: u64, index: usize) -> QOptConfig {
    let mut rng = SplitRng::with_path(seed, &[index as u64]);
    let eta = rng.log_uniform(space.eta.0, space.eta.1);
    let xi = rng.log_uniform(space.xi.0, space.xi.1);
    let gamma = rng.uniform_range(space.gamma.0, space.gamma.1);
    QOptConfig::new(
        method,
        eta,
        if method.uses_xi() { xi } else { 0.0 },
        if method.uses_gamma() { gamma } else { 0.0 },
    )
}

/// Seeded random search minimizing the trimmed mean of iterations over
/// `instances`. The first trial wins ties.
pub fn tune(method: QMethod, instances: &[Instance], opts: &TuneOptions) -> Result<TuneResult> {
    ensure_dims(opts.n_trials >= 1, || "need at least one trial".into())?;
    let hams: Vec<GappedHamiltonian> = instances.iter().map(Instance::hamiltonian).collect::<Result<_>>()?;
    let mut trials = Vec::with_capacity(opts.n_trials);
    for index in 0..opts.n_trials {
        let cfg = draw_trial(method, &opts.space, opts.seed, index);
        let records: Vec<RunRecord> = instances
            .par_iter()
            .zip(&hams)
            .map(|(inst, h)| run_one(inst, h, &cfg, &opts.noise, &opts.limits))
            .collect();
        let iterations: Vec<f64> = records
            .iter()
            .map(|r| r.capped_iterations(opts.limits.max_iters))
            .collect();
        trials.push(Trial {
            index,
            method,
            eta: cfg.eta,
            xi: cfg.xi,
            gamma: cfg.gamma,
            objective: trimmed_mean(&iterations, opts.trim, opts.convention)?,
            n_converged: records.iter().filter(|r| r.converged).count(),
            iterations,
        });
    }
    let best = trials
        .iter()
        .fold(&trials[0], |b, t| if t.objective < b.objective { t } else { b })
        .clone();
    Ok(TuneResult {
        best,
        trials,
        trim: opts.trim,
        convention: opts.convention,
    })
}

pub fn write_trials_csv<W: Write>(res: &TuneResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "method",
        "eta",
        "xi",
        "gamma",
        "objective",
        "n_converged",
        "n_circuits",
        "trim",
        "trim_convention",
        "best",
        "iterations",
    ])?;
    for t in &res.trials {
        w.write_record([
            t.index.to_string(),
            t.method.to_string(),
            fmt_f64(t.eta),
            fmt_f64(t.xi),
            fmt_f64(t.gamma),
            fmt_f64(t.objective),
            t.n_converged.to_string(),
            t.iterations.len().to_string(),
            fmt_f64(res.trim),
            res.convention.to_string(),
            (t.index == res.best.index).to_string(),
            t.iterations.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile_csv<W: Write>(curves: &[ProfileCurve], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "tau", "fraction"])?;
    for c in curves {
        for (t, f) in c.taus.iter().zip(&c.fractions) {
            w.write_record([c.method.clone(), fmt_f64(*t), fmt_f64(*f)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_winrate_csv<W: Write>(points: &[WinRatePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["threshold", "method", "win_rate", "n_solved"])?;
    for p in points {
        for (m, name) in p.methods.iter().enumerate() {
            let rate = p.rates.as_ref().map_or(f64::NAN, |r| r[m]);
            w.write_record([
                fmt_f64(p.threshold),
                name.clone(),
                fmt_f64(rate),
                p.n_solved.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(times: &[&[Option<f64>]]) -> TimeTable {
        let m = times[0].len();
        TimeTable::new(
            (0..m).map(|i| format!("m{i}")).collect(),
            (0..times.len()).collect(),
            times.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn trimmed_mean_examples() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(trimmed_mean(&xs, 0.2, TrimConvention::Total).unwrap(), 5.5);
        assert_eq!(trimmed_mean(&xs, 0.0, TrimConvention::Total).unwrap(), 5.5);
        assert_eq!(trimmed_mean(&[3.0; 7], 0.2, TrimConvention::Total).unwrap(), 3.0);
        let mut skewed = xs.clone();
        skewed[9] = 1e6;
        assert_eq!(trimmed_mean(&skewed, 0.2, TrimConvention::EachTail).unwrap(), 5.5);
        assert!(matches!(
            trimmed_mean(&[1.0, 2.0], 1.0, TrimConvention::Total),
            Err(Error::EmptyAfterTrim { .. })
        ));
        assert!(trimmed_mean(&[], 0.0, TrimConvention::Total).is_err());
    }

    #[test]
    fn profile_examples() {
        let t = table(&[&[Some(10.0), Some(20.0)], &[Some(30.0), Some(15.0)]]);
        let c = dolan_more(&t).unwrap();
        assert_eq!(c[0].at(1.0), 0.5);
        assert_eq!(c[1].at(1.0), 0.5);
        assert_eq!(c[0].at(2.0), 1.0);
        let single = table(&[&[Some(4.0)], &[Some(9.0)]]);
        assert_eq!(dolan_more(&single).unwrap()[0].at(1.0), 1.0);
        let tied = table(&[&[Some(5.0), Some(5.0)]]);
        assert!(dolan_more(&tied).unwrap().iter().all(|c| c.at(1.0) == 1.0));
        let none = table(&[&[None, None]]);
        assert_eq!(dolan_more(&none), Err(Error::NoSolvedInstances));
    }

    #[test]
    fn win_rate_examples() {
        let t = table(&[
            &[Some(1.0), Some(2.0)],
            &[Some(1.0), Some(3.0)],
            &[Some(5.0), Some(2.0)],
        ]);
        let w = win_rate(&t).unwrap();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15 && (w[1] - 1.0 / 3.0).abs() < 1e-15);
        let tied = table(&[&[Some(2.0), Some(2.0)], &[Some(7.0), Some(7.0)]]);
        assert_eq!(win_rate(&tied).unwrap(), vec![0.5, 0.5]);
        let unsolved_row = table(&[&[None, None], &[Some(3.0), None]]);
        assert_eq!(win_rate(&unsolved_row).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn threshold_parsing() {
        let t = parse_thresholds("1e-2:1e-12:log").unwrap();
        assert_eq!(t.len(), 11);
        assert_eq!(t[0], 1e-2);
        assert_eq!(t[6], 1e-8);
        assert_eq!(parse_thresholds("1e-3,1e-5").unwrap(), vec![1e-3, 1e-5]);
        assert_eq!(parse_thresholds("1e-1:1e-3:log:5").unwrap().len(), 5);
        assert!(parse_thresholds("0:1e-3:log").is_err());
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(parse_f64(&fmt_f64(0.1)).unwrap(), 0.1);
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(parse_f64("inf").unwrap(), f64::INFINITY);
    }

    #[test]
    fn streak_start_is_reported() {
        let mut s = Streak::new(1.0, 3);
        for (k, e) in [(1, 0.5), (2, 2.0), (3, 0.1), (4, 0.1)] {
            s.update(k, e);
        }
        assert_eq!(s.found, None);
        s.update(5, 0.1);
        assert_eq!(s.found, Some(3));
    }

    proptest! {
        #[test]
        fn profiles_are_monotone_and_win_rates_sum_to_one(
            cells in proptest::collection::vec(proptest::option::of(1u32..50), 3 * 6)
        ) {
            let rows: Vec<Vec<Option<f64>>> =
                cells.chunks(3).map(|c| c.iter().map(|v| v.map(f64::from)).collect()).collect();
            let t = TimeTable::new(vec!["a".into(), "b".into(), "c".into()], (0..6).collect(), rows).unwrap();
            match dolan_more(&t) {
                Err(e) => prop_assert_eq!(e, Error::NoSolvedInstances),
                Ok(curves) => {
                    for c in &curves {
                        prop_assert!(c.fractions.windows(2).all(|w| w[0] <= w[1]));
                        prop_assert!(c.fractions.iter().all(|f| (0.0..=1.0).contains(f)));
                    }
                    let w = win_rate(&t).unwrap();
                    prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn trimmed_mean_is_bounded(xs in proptest::collection::vec(-1e3f64..1e3, 5..40), p in 0.0f64..0.8) {
            let m = trimmed_mean(&xs, p, TrimConvention::Total).unwrap();
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m >= lo - 1e-9 && m <= hi + 1e-9);
        }
    }
}
