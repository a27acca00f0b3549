use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vqgeo::bench::{self, EnsembleFile, EnsembleSpec, Limits, NoiseConfig, TimeTable, TrimConvention, TuneOptions};
use vqgeo::fisher_mlp::{train_run, MlpSpec, SyntheticDataset, TrainConfig};
use vqgeo::infogeo::{ricci_scalar, ExpFamilyPoint, FamilyTag, KernelParams, MetricFamily, RicciMode};
use vqgeo::metrics::{rate_table, SigmaForm};
use vqgeo::optim::{ClassicalHyper, ClassicalMethod, QMethod, QOptConfig, DEFAULT_DAMPING};
use vqgeo::qsim::DEFAULT_GAP;

#[derive(Parser)]
#[command(name = "vqgeo", version, about = "Loss-aware natural-gradient benchmark harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded circuit and Hamiltonian ensemble
    Gen(GenArgs),
    /// Optimize every circuit of an ensemble with one method
    Run(RunArgs),
    /// Random hyperparameter search on an ensemble
    Tune(TuneArgs),
    /// Dolan–Moré performance profile from a runs table
    Profile(ProfileArgs),
    /// Win rate of each method across error thresholds
    Winrate(WinrateArgs),
    /// Effective learning-rate curves of the conformal factors
    Rates(RatesArgs),
    /// Normal-family information geometry
    Infogeo {
        #[command(subcommand)]
        cmd: InfogeoCmd,
    },
    /// Classical MLP task
    Mlp {
        #[command(subcommand)]
        cmd: MlpCmd,
    },
}

#[derive(Subcommand)]
enum InfogeoCmd {
    /// Closed-form and numeric Ricci scalar along a θ² grid
    Curvature(CurvatureArgs),
}

#[derive(Subcommand)]
enum MlpCmd {
    /// Train once and write the loss/accuracy trace
    Train(MlpTrainArgs),
}

fn qmethod(s: &str) -> Result<QMethod, String> {
    s.parse().map_err(|e: vqgeo::Error| e.to_string())
}

fn cmethod(s: &str) -> Result<ClassicalMethod, String> {
    s.parse().map_err(|e: vqgeo::Error| e.to_string())
}

fn family(s: &str) -> Result<FamilyTag, String> {
    s.parse().map_err(|e: vqgeo::Error| e.to_string())
}

fn trim_convention(s: &str) -> Result<TrimConvention, String> {
    s.parse().map_err(|e: vqgeo::Error| e.to_string())
}

fn sigma_form(s: &str) -> Result<SigmaForm, String> {
    match s {
        "inverse" => Ok(SigmaForm::Inverse),
        "literal" => Ok(SigmaForm::Literal),
        _ => Err(format!("unknown sigma form {s:?} (inverse|literal)")),
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 6)]
    qubits: usize,
    #[arg(long, default_value_t = 5)]
    layers: usize,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_GAP)]
    gap: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct LoopArgs {
    /// QGT noise strength ς
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Draw the QGT noise once instead of every iteration
    #[arg(long)]
    noise_fixed: bool,
    #[arg(long, default_value_t = bench::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = bench::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = bench::DEFAULT_WINDOW)]
    window: usize,
}

impl LoopArgs {
    fn noise(&self) -> NoiseConfig {
        NoiseConfig {
            strength: self.noise,
            epsilon: self.eps,
            fixed: self.noise_fixed,
        }
    }

    fn limits(&self) -> Limits {
        Limits {
            max_iters: self.max_iters,
            tol: self.tol,
            window: self.window,
            ..Limits::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    circuits: PathBuf,
    #[arg(long, value_parser = qmethod)]
    method: QMethod,
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    damping: f64,
    #[arg(long, default_value = "inverse", value_parser = sigma_form)]
    sigma_form: SigmaForm,
    #[command(flatten)]
    run: LoopArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long, value_parser = qmethod)]
    method: QMethod,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    circuits: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = bench::DEFAULT_TRIM)]
    trim: f64,
    #[arg(long, default_value = "total", value_parser = trim_convention)]
    trim_convention: TrimConvention,
    #[command(flatten)]
    run: LoopArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// One or more runs tables, concatenated
    #[arg(long, num_args = 1.., required = true)]
    runs: Vec<PathBuf>,
    #[arg(long, default_value_t = bench::PROFILE_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WinrateArgs {
    /// One or more runs tables, concatenated
    #[arg(long, num_args = 1.., required = true)]
    runs: Vec<PathBuf>,
    /// `a:b:log`, `a:b:log:n` or a comma-separated list
    #[arg(long, default_value = "1e-2:1e-12:log")]
    thresholds: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 50.0)]
    sigma_max: f64,
    #[arg(long, default_value_t = 501)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[arg(long, value_parser = family)]
    family: FamilyTag,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Learning rate entering the loss-aware rank-1 term
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 0.0)]
    theta1: f64,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    theta2_min: f64,
    #[arg(long, default_value_t = -0.05, allow_hyphen_values = true)]
    theta2_max: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MlpTrainArgs {
    #[arg(long, value_parser = cmethod)]
    optimizer: ClassicalMethod,
    #[arg(long, default_value_t = 1e-2)]
    eta: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    xi: f64,
    /// Fisher damping δ̃
    #[arg(long, default_value_t = 1e-3)]
    damping: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = 128)]
    batch: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_ensemble(path: &Path) -> Result<EnsembleFile> {
    EnsembleFile::load(path).with_context(|| format!("reading ensemble {}", path.display()))
}

fn load_runs(path: &Path) -> Result<Vec<bench::RunRecord>> {
    bench::load_runs(path).with_context(|| format!("reading runs {}", path.display()))
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<bench::RunRecord>> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(load_runs(p)?);
    }
    Ok(all)
}

fn gen(a: GenArgs) -> Result<()> {
    let spec = EnsembleSpec {
        gap: a.gap,
        ..EnsembleSpec::new(a.count, a.qubits, a.layers, a.seed)
    };
    let file = EnsembleFile::generate(spec)?;
    let mut w = output(&a.out)?;
    serde_json::to_writer(&mut w, &file)?;
    writeln!(w)?;
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let ens = load_ensemble(&a.circuits)?;
    let cfg = QOptConfig {
        damping: a.damping,
        sigma_form: a.sigma_form,
        ..QOptConfig::new(a.method, a.eta, a.xi, a.gamma)
    };
    let records = bench::run_ensemble(&ens.instances, &cfg, &a.run.noise(), &a.run.limits())?;
    let solved = records.iter().filter(|r| r.converged).count();
    eprintln!("{}: {solved}/{} converged", a.method, records.len());
    bench::write_runs_csv(&records, output(&a.out)?)?;
    Ok(())
}

fn tune(a: TuneArgs) -> Result<()> {
    let ens = load_ensemble(&a.circuits)?;
    let opts = TuneOptions {
        noise: a.run.noise(),
        limits: a.run.limits(),
        trim: a.trim,
        convention: a.trim_convention,
        ..TuneOptions::new(a.trials, a.seed)
    };
    let res = bench::tune(a.method, &ens.instances, &opts)?;
    let b = &res.best;
    eprintln!(
        "best trial {}: eta={} xi={} gamma={} objective={}",
        b.index, b.eta, b.xi, b.gamma, b.objective
    );
    bench::write_trials_csv(&res, output(&a.out)?)?;
    Ok(())
}

fn profile(a: ProfileArgs) -> Result<()> {
    let records = load_all(&a.runs)?;
    let table = TimeTable::from_records(&records, a.threshold)?;
    let curves = bench::dolan_more(&table)?;
    bench::write_profile_csv(&curves, output(&a.out)?)?;
    Ok(())
}

fn winrate(a: WinrateArgs) -> Result<()> {
    let records = load_all(&a.runs)?;
    let thresholds = bench::parse_thresholds(&a.thresholds)?;
    let points = bench::win_rate_curve(&records, &thresholds)?;
    bench::write_winrate_csv(&points, output(&a.out)?)?;
    Ok(())
}

fn rates(a: RatesArgs) -> Result<()> {
    if !(a.sigma_max > 0.0) || a.points < 2 {
        bail!("need --sigma-max > 0 and --points >= 2");
    }
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["sigma", "la", "cla1", "cla2", "cla3"])?;
    for row in rate_table(a.gamma, a.sigma_max, a.points) {
        w.write_record(row.map(bench::fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

fn curvature(a: CurvatureArgs) -> Result<()> {
    if !(a.theta2_min < 0.0 && a.theta2_max < 0.0) || a.points < 1 {
        bail!("θ² must be negative and --points at least 1");
    }
    let fam = MetricFamily::new(a.family, KernelParams::new(a.kappa, a.eta, a.gamma));
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["theta2", "R_closed", "R_numeric"])?;
    for i in 0..a.points {
        let t = if a.points == 1 {
            0.0
        } else {
            i as f64 / (a.points - 1) as f64
        };
        let theta2 = a.theta2_min + t * (a.theta2_max - a.theta2_min);
        let p = ExpFamilyPoint::new(a.theta1, theta2)?;
        let closed = ricci_scalar(&fam, &p, RicciMode::ClosedForm)?;
        let numeric = ricci_scalar(&fam, &p, RicciMode::Numeric)?;
        w.write_record([theta2, closed, numeric].map(bench::fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

fn mlp_train(a: MlpTrainArgs) -> Result<()> {
    let spec = MlpSpec::default_task(a.seed);
    let (train, val) = SyntheticDataset::default_splits(a.seed);
    let hyper = ClassicalHyper {
        eta: a.eta,
        gamma: a.gamma,
        lambda: a.lambda,
        xi: a.xi,
        damping: a.damping,
        ..ClassicalHyper::default()
    };
    let cfg = TrainConfig {
        batch_size: a.batch,
        max_steps: a.steps,
        ..TrainConfig::default()
    };
    let trace = train_run(&spec, &train, &val, a.optimizer, hyper, &cfg, a.seed)?;
    if !trace.valid {
        eprintln!("warning: run diverged after {} steps", trace.rows.len());
    }
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["step", "train_loss", "val_accuracy"])?;
    for r in &trace.rows {
        w.write_record([
            r.step.to_string(),
            bench::fmt_f64(r.train_loss),
            r.val_accuracy.map(bench::fmt_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Run(a) => run(a),
        Cmd::Tune(a) => tune(a),
        Cmd::Profile(a) => profile(a),
        Cmd::Winrate(a) => winrate(a),
        Cmd::Rates(a) => rates(a),
        Cmd::Infogeo {
            cmd: InfogeoCmd::Curvature(a),
        } => curvature(a),
        Cmd::Mlp { cmd: MlpCmd::Train(a) } => mlp_train(a),
    }
}
