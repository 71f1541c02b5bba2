use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hopfield_cli::experiment::{run_gamma_sweep, run_recovery_curve, ExperimentConfig, Method, Units};
use hopfield_cli::fixture::{self, BUNDLED};
use hopfield_cli::io::{self as hio, Format, DEFAULT_BASES};
use hopfield_cli::qcheck::{self, QcheckConfig};
use hopfield_core::classical::{self, RecallOptions, Thresholds, ZeroFill};
use hopfield_core::inversion::{assemble, solve};
use hopfield_core::quantum::{qhop_solve, EvolutionMode, HebbianSource, QhopConfig};
use hopfield_core::{hebbian, ClampSet, TrainingSet, WeightMatrix};

#[derive(Parser)]
#[command(name = "hopfield", version, about = "Hopfield associative memory: training, recall and experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hebbian weights of a dataset, as a matrix CSV.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Completes incomplete patterns (0 = unknown) read from a file.
    Recall(RecallArgs),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Quantum-versus-classical cross-check on small random instances.
    Qcheck(QcheckArgs),
    /// Writes a synthetic RNA FASTA like the bundled one.
    Fixture {
        #[arg(long, default_value_t = fixture::FIXTURE_SEED)]
        seed: u64,
        #[arg(long, default_value_t = fixture::FIXTURE_SEQUENCES)]
        count: usize,
        #[arg(long, default_value_t = fixture::FIXTURE_BASES)]
        bases: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Mean Hamming distance against the number of known neurons.
    RecoveryCurve(CurveArgs),
    /// Mean Hamming distance against γ at one fixed l.
    GammaSweep {
        #[command(flatten)]
        curve: CurveArgs,
        /// Comma-separated γ values.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.05,0.1,0.2,0.3,0.5,0.7,1,1.5,2")]
        gamma_grid: Vec<f64>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Dataset file; the bundled synthetic fixture when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Fasta)]
    format: Format,
    /// Bases kept per FASTA record.
    #[arg(long, default_value_t = DEFAULT_BASES)]
    bases: usize,
}

impl DataArgs {
    fn load(&self) -> Result<TrainingSet> {
        Ok(match &self.data {
            Some(p) => hio::ingest(p, self.format, self.bases).with_context(|| format!("reading {}", p.display()))?,
            None => hio::fasta_training_set(BUNDLED, self.bases)?,
        })
    }
}

#[derive(Args)]
struct RecallArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Matrix CSV from `train`, used instead of the dataset (not for quantum).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Pattern file with 0 at unknown neurons.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Inversion)]
    method: Method,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 9)]
    phase_qubits: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Expected dimension; checked against the dataset.
    #[arg(long)]
    d: Option<usize>,
    /// Expected pattern count; checked against the dataset.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Known-neuron counts: comma-separated values or start:end:step ranges.
    #[arg(long)]
    l_grid: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Inversion)]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Erase whole RNA bases or single neurons.
    #[arg(long, value_enum)]
    units: Option<Units>,
    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
    /// Fill unknown neurons with random ±1 instead of +1 (iterative only).
    #[arg(long)]
    random_fill: bool,
    #[arg(long, default_value_t = 9)]
    phase_qubits: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QcheckArgs {
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 9)]
    phase_qubits: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the two-neuron worked system instead of random instances.
    #[arg(long)]
    worked: bool,
    /// Build the evolution from pattern projectors rather than ρ directly.
    #[arg(long)]
    hebbian: bool,
    #[arg(long)]
    min_fidelity: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad l-grid entry {item:?}"));
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b] | [a, b, _] => {
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                if step == 0 {
                    bail!("l-grid step is zero in {item:?}");
                }
                out.extend((num(a)?..=num(b)?).step_by(step));
            }
            _ => bail!("bad l-grid entry {item:?}"),
        }
    }
    Ok(out)
}

fn default_mu(method: Method) -> f64 {
    if method == Method::Quantum {
        0.05
    } else {
        0.0
    }
}

fn curve_config(
    a: &CurveArgs,
    ts: &TrainingSet,
    default_grid: impl Fn(usize, Units) -> Vec<usize>,
) -> Result<ExperimentConfig> {
    let units = a.units.unwrap_or(match a.data.format {
        Format::Fasta => Units::Bases,
        Format::Patterns => Units::Neurons,
    });
    let d = a.d.unwrap_or(ts.dim());
    let cfg = ExperimentConfig {
        d,
        m: a.m.unwrap_or(ts.len()),
        reps: a.reps,
        l_grid: match &a.l_grid {
            Some(s) => parse_grid(s)?,
            None => default_grid(d, units),
        },
        gamma: a.gamma,
        mu: a.mu.unwrap_or(default_mu(a.method)),
        method: a.method,
        seed: a.seed,
        units,
        max_sweeps: a.max_sweeps,
        zero_fill: if a.random_fill { ZeroFill::Random } else { ZeroFill::Plus },
        phase_qubits: a.phase_qubits,
    };
    cfg.validate()?;
    cfg.check_dataset(ts)?;
    Ok(cfg)
}

fn load_weights(path: &Path) -> Result<WeightMatrix> {
    let m = hio::read_matrix(&hio::read_text(path)?).with_context(|| format!("reading {}", path.display()))?;
    Ok(WeightMatrix::from_matrix(m)?)
}

fn recall_cmd(a: &RecallArgs) -> Result<()> {
    let inputs =
        hio::parse_patterns(&hio::read_text(&a.input)?).with_context(|| format!("reading {}", a.input.display()))?;
    let (w, ts) = match &a.weights {
        Some(p) if a.method == Method::Quantum => bail!("quantum recall needs the dataset, not {}", p.display()),
        Some(p) => (load_weights(p)?, None),
        None => {
            let ts = a.data.load()?;
            (hebbian::train(&ts)?, Some(ts))
        }
    };
    let th = Thresholds::zeros(w.dim());
    let mu = a.mu.unwrap_or(default_mu(a.method));
    let mut out = output(&a.out)?;
    for (line, x) in &inputs {
        let ctx = || format!("{}: line {line}", a.input.display());
        if x.dim() != w.dim() {
            bail!("{}: pattern has {} entries, network has {}", ctx(), x.dim(), w.dim());
        }
        let y = match a.method {
            Method::Iterative => {
                classical::recall_with(&w, x, &th, a.seed, RecallOptions::default()).with_context(ctx)?.state
            }
            Method::Inversion => {
                let clamp = ClampSet::from_incomplete(x).with_context(ctx)?;
                let sys = assemble(&w, &clamp, &th, a.gamma).with_context(ctx)?;
                for warn in sys.warnings() {
                    eprintln!("warning: {warn}");
                }
                solve(&sys, mu).with_context(ctx)?.discretized
            }
            Method::Quantum => {
                let clamp = ClampSet::from_incomplete(x).with_context(ctx)?;
                let cfg = QhopConfig { gamma: a.gamma, mu, phase_qubits: a.phase_qubits, ..Default::default() };
                let ts = ts.as_ref().expect("dataset loaded");
                let r = qhop_solve(HebbianSource::Patterns(ts), &clamp, &th, &cfg).with_context(ctx)?;
                for warn in &r.warnings {
                    eprintln!("warning: {warn}");
                }
                r.discretized
            }
        };
        let row: Vec<&str> = y.values().iter().map(|&v| if v > 0.0 { "+1" } else { "-1" }).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

fn qcheck_cmd(a: &QcheckArgs) -> Result<bool> {
    let mut cfg = QcheckConfig {
        d: a.d,
        seeds: a.seeds,
        phase_qubits: a.phase_qubits,
        gamma: a.gamma,
        mu: a.mu,
        mode: if a.hebbian { EvolutionMode::Hebbian } else { EvolutionMode::Reference },
        seed: a.seed,
        ..Default::default()
    };
    let rows = if a.worked {
        cfg.min_fidelity = a.min_fidelity.unwrap_or(0.99);
        vec![qcheck::check_instance(&qcheck::worked_instance(), &cfg)?]
    } else {
        cfg.min_fidelity = a.min_fidelity.unwrap_or(cfg.min_fidelity);
        qcheck::run_quantum_crosscheck(&cfg)?
    };
    let mut out = output(&a.out)?;
    qcheck::write_rows(&mut out, &rows)?;
    out.flush()?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("qcheck: {failed} of {} instances FAIL", rows.len());
    }
    Ok(failed == 0)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Train { data, out } => {
            let ts = data.load()?;
            let w = hebbian::train(&ts)?;
            eprintln!(
                "d={} M={} spectral_norm={} capacity={}",
                ts.dim(),
                ts.len(),
                w.spectral_norm(),
                hebbian::capacity(ts.dim())?
            );
            let mut o = output(&out)?;
            hio::write_matrix(&mut o, w.matrix())?;
            o.flush()?;
        }
        Cmd::Recall(a) => recall_cmd(&a)?,
        Cmd::Experiment(ExperimentCmd::RecoveryCurve(a)) => {
            let ts = a.data.load()?;
            let cfg = curve_config(&a, &ts, |d, units| match units {
                Units::Bases => (2..d).step_by(2).collect(),
                Units::Neurons => (1..d).collect(),
            })?;
            let pts = run_recovery_curve(&cfg, &ts)?;
            let mut o = output(&a.out)?;
            hio::write_curve(&mut o, "l", &pts)?;
            o.flush()?;
        }
        Cmd::Experiment(ExperimentCmd::GammaSweep { curve, gamma_grid }) => {
            let ts = curve.data.load()?;
            let cfg = curve_config(&curve, &ts, |d, _| vec![(d / 2).max(1)])?;
            let pts = run_gamma_sweep(&cfg, &ts, &gamma_grid)?;
            let mut o = output(&curve.out)?;
            hio::write_curve(&mut o, "gamma", &pts)?;
            o.flush()?;
        }
        Cmd::Qcheck(a) => return qcheck_cmd(&a),
        Cmd::Fixture { seed, count, bases, out } => {
            let mut o = output(&out)?;
            o.write_all(fixture::synthetic_fasta(seed, count, bases).as_bytes())?;
            o.flush()?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
