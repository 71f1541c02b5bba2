//! Recovery-curve and γ-sweep experiments.
//!
//! Every repetition draws from its own stream, seeded by `(seed, l, rep)`, so
//! results do not depend on how rayon schedules the work.

use hopfield_core::classical::{self, RecallOptions, Thresholds, ZeroFill};
use hopfield_core::inversion::{assemble, solve};
use hopfield_core::patterns::{erase, hamming, random_base_keep, random_keep};
use hopfield_core::quantum::register::qubits_for;
use hopfield_core::quantum::{qhop_solve, HebbianSource, QhopConfig};
use hopfield_core::rng::{from_seed, stream_seed};
use hopfield_core::{hebbian, TrainingSet, WeightMatrix};
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::io::CurvePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Iterative,
    Inversion,
    Quantum,
}

/// How known neurons are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Units {
    /// Whole RNA bases, two neurons each; `l` must be even.
    Bases,
    /// Individual neurons.
    Neurons,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("l-grid is empty")]
    EmptyGrid,
    #[error("l = {l} is outside 1..={max}")]
    LOutOfRange { l: usize, max: usize },
    #[error("l = {l} is odd but known neurons are drawn as whole bases")]
    OddL { l: usize },
    #[error("dataset has d = {found}, config says {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dataset has M = {found} patterns, config says {expected}")]
    PatternCountMismatch { expected: usize, found: usize },
    #[error("{name} = {value} is out of range")]
    Parameter { name: &'static str, value: f64 },
    #[error("the γ sweep takes exactly one l, got {0}")]
    SweepGrid(usize),
    #[error("the γ sweep only runs the inversion method")]
    SweepMethod,
    #[error("quantum recall of d = {d} needs {required} qubits, cap is {cap}")]
    QubitCap { d: usize, required: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    pub m: usize,
    pub reps: usize,
    /// Known-neuron counts. In base units each value counts neurons, so
    /// `l = 2` keeps one base.
    pub l_grid: Vec<usize>,
    pub gamma: f64,
    pub mu: f64,
    pub method: Method,
    pub seed: u64,
    pub units: Units,
    pub max_sweeps: usize,
    pub zero_fill: ZeroFill,
    pub phase_qubits: usize,
}

impl ExperimentConfig {
    /// Defaults for the bundled fixture: d = 100, M = 8, bases, 1000
    /// repetitions, l = 2, 4, …, 98.
    pub fn fixture(method: Method) -> Self {
        Self {
            d: 100,
            m: 8,
            reps: 1000,
            l_grid: (1..=49).map(|b| 2 * b).collect(),
            gamma: 1.0,
            mu: 0.0,
            method,
            seed: 0,
            units: Units::Bases,
            max_sweeps: 100,
            zero_fill: ZeroFill::Plus,
            phase_qubits: 9,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.reps == 0 {
            return Err(ConfigError::NoRepetitions);
        }
        if self.l_grid.is_empty() {
            return Err(ConfigError::EmptyGrid);
        }
        for &l in &self.l_grid {
            if l == 0 || l >= self.d {
                return Err(ConfigError::LOutOfRange { l, max: self.d.saturating_sub(1) });
            }
            if self.units == Units::Bases && l % 2 == 1 {
                return Err(ConfigError::OddL { l });
            }
        }
        if self.method != Method::Iterative && !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(ConfigError::Parameter { name: "gamma", value: self.gamma });
        }
        let mu_ok = match self.method {
            Method::Quantum => self.mu > 0.0,
            _ => self.mu >= 0.0,
        };
        if !(mu_ok && self.mu.is_finite()) {
            return Err(ConfigError::Parameter { name: "mu", value: self.mu });
        }
        if self.method == Method::Quantum {
            let cap = hopfield_core::quantum::qhop::QUBIT_CAP;
            let required = self.phase_qubits + qubits_for(self.d) + 1 + 2;
            if required > cap {
                return Err(ConfigError::QubitCap { d: self.d, required, cap });
            }
        }
        Ok(())
    }

    pub fn check_dataset(&self, ts: &TrainingSet) -> Result<(), ConfigError> {
        if ts.dim() != self.d {
            return Err(ConfigError::DimensionMismatch { expected: self.d, found: ts.dim() });
        }
        if ts.len() != self.m {
            return Err(ConfigError::PatternCountMismatch { expected: self.m, found: ts.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("l = {l}, repetition {rep}: {source}")]
    Recall { l: usize, rep: usize, source: hopfield_core::Error },
    #[error(transparent)]
    Core(#[from] hopfield_core::Error),
}

struct Prepared<'a> {
    ts: &'a TrainingSet,
    w: WeightMatrix,
    theta: Thresholds,
}

impl<'a> Prepared<'a> {
    fn new(cfg: &ExperimentConfig, ts: &'a TrainingSet) -> Result<Self, ExperimentError> {
        cfg.validate()?;
        cfg.check_dataset(ts)?;
        Ok(Self { ts, w: hebbian::train(ts)?, theta: Thresholds::zeros(cfg.d) })
    }

    /// Hamming distance after one erase-and-recall trial.
    fn trial(&self, cfg: &ExperimentConfig, gamma: f64, l: usize, rep: usize) -> hopfield_core::Result<usize> {
        let s = stream_seed(cfg.seed, &[l as u64, rep as u64]);
        let k = from_seed(stream_seed(s, &[0])).gen_range(0..self.ts.len());
        let truth = &self.ts.patterns()[k];
        let keep = match cfg.units {
            Units::Bases => random_base_keep(cfg.d, l / 2, stream_seed(s, &[1]))?,
            Units::Neurons => random_keep(cfg.d, l, stream_seed(s, &[1]))?,
        };
        let (start, clamp) = erase(truth, &keep)?;
        let recalled = match cfg.method {
            Method::Iterative => {
                let opts = RecallOptions { max_sweeps: cfg.max_sweeps, zero_fill: cfg.zero_fill, ..Default::default() };
                classical::recall_with(&self.w, &start, &self.theta, stream_seed(s, &[2]), opts)?.state
            }
            Method::Inversion => solve(&assemble(&self.w, &clamp, &self.theta, gamma)?, cfg.mu)?.discretized,
            Method::Quantum => {
                let qc = QhopConfig { gamma, mu: cfg.mu, phase_qubits: cfg.phase_qubits, ..Default::default() };
                qhop_solve(HebbianSource::Patterns(self.ts), &clamp, &self.theta, &qc)?.discretized
            }
        };
        hamming(&recalled, truth)
    }

    fn point(&self, cfg: &ExperimentConfig, gamma: f64, l: usize, key: f64) -> Result<CurvePoint, ExperimentError> {
        let dists = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| self.trial(cfg, gamma, l, rep).map_err(|source| ExperimentError::Recall { l, rep, source }))
            .collect::<Result<Vec<usize>, _>>()?;
        let (mean, stderr) = mean_stderr(&dists);
        Ok(CurvePoint { key, mean_hamming: mean, stderr, reps: cfg.reps })
    }
}

/// Sample mean and standard error of the mean (0 for a single sample).
pub fn mean_stderr(xs: &[usize]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<usize>() as f64 / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean Hamming distance to the truth for every `l` in the grid.
pub fn run_recovery_curve(cfg: &ExperimentConfig, ts: &TrainingSet) -> Result<Vec<CurvePoint>, ExperimentError> {
    let prep = Prepared::new(cfg, ts)?;
    cfg.l_grid.iter().map(|&l| prep.point(cfg, cfg.gamma, l, l as f64)).collect()
}

/// Inversion recall at the single grid `l`, swept over γ. Repetition seeds
/// ignore γ, so each γ sees the same erasures and a one-point sweep equals
/// the matching recovery-curve cell.
pub fn run_gamma_sweep(
    cfg: &ExperimentConfig,
    ts: &TrainingSet,
    gammas: &[f64],
) -> Result<Vec<CurvePoint>, ExperimentError> {
    if cfg.method != Method::Inversion {
        return Err(ConfigError::SweepMethod.into());
    }
    if cfg.l_grid.len() != 1 {
        return Err(ConfigError::SweepGrid(cfg.l_grid.len()).into());
    }
    if let Some(&g) = gammas.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
        return Err(ConfigError::Parameter { name: "gamma", value: g }.into());
    }
    let prep = Prepared::new(cfg, ts)?;
    let l = cfg.l_grid[0];
    gammas.iter().map(|&g| prep.point(cfg, g, l, g)).collect()
}

/// Largest amount by which a point exceeds an earlier one, in pooled
/// standard errors `sqrt(se_i² + se_j²)`. Zero when the curve never rises.
/// Exact rises between zero-variance points count as infinite.
pub fn worst_rise(points: &[CurvePoint]) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, pj) in points.iter().enumerate() {
        for pi in &points[..j] {
            let rise = pj.mean_hamming - pi.mean_hamming;
            if rise > 0.0 {
                let pooled = (pi.stderr.powi(2) + pj.stderr.powi(2)).sqrt();
                worst = worst.max(if pooled > 0.0 { rise / pooled } else { f64::INFINITY });
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use hopfield_core::ActivationPattern;

    fn small_set() -> TrainingSet {
        let rows: [[i8; 8]; 2] = [[1, 1, 1, 1, -1, -1, -1, -1], [1, -1, 1, -1, 1, -1, 1, -1]];
        TrainingSet::new(rows.iter().map(|r| ActivationPattern::from_signs(r).unwrap()).collect()).unwrap()
    }

    fn small_cfg(method: Method) -> ExperimentConfig {
        ExperimentConfig { d: 8, m: 2, reps: 20, l_grid: vec![2, 4, 6], ..ExperimentConfig::fixture(method) }
    }

    #[test]
    fn validation() {
        let ok = small_cfg(Method::Inversion);
        assert!(ok.validate().is_ok());
        assert_eq!(ExperimentConfig { reps: 0, ..ok.clone() }.validate(), Err(ConfigError::NoRepetitions));
        assert_eq!(
            ExperimentConfig { l_grid: vec![8], ..ok.clone() }.validate(),
            Err(ConfigError::LOutOfRange { l: 8, max: 7 })
        );
        assert_eq!(ExperimentConfig { l_grid: vec![3], ..ok.clone() }.validate(), Err(ConfigError::OddL { l: 3 }));
        assert!(ExperimentConfig { l_grid: vec![3], units: Units::Neurons, ..ok.clone() }.validate().is_ok());
        assert!(ExperimentConfig { gamma: 0.0, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { gamma: 0.0, ..small_cfg(Method::Iterative) }.validate().is_ok());
        let q = ExperimentConfig { d: 100, mu: 0.05, ..small_cfg(Method::Quantum) };
        assert_eq!(q.validate(), Err(ConfigError::QubitCap { d: 100, required: 9 + 7 + 1 + 2, cap: 16 }));
        assert!(ExperimentConfig { mu: 0.0, ..small_cfg(Method::Quantum) }.validate().is_err());
        let ts = small_set();
        assert!(ExperimentConfig { m: 3, ..ok }.check_dataset(&ts).is_err());
    }

    #[test]
    fn stats() {
        assert_eq!(mean_stderr(&[3]), (3.0, 0.0));
        let (m, se) = mean_stderr(&[0, 2]);
        assert_eq!(m, 1.0);
        assert!((se - 1.0).abs() < 1e-15);
        let p = |m, s| CurvePoint { key: 0.0, mean_hamming: m, stderr: s, reps: 1 };
        assert_eq!(worst_rise(&[p(3.0, 0.1), p(2.0, 0.1), p(0.0, 0.0)]), 0.0);
        assert!((worst_rise(&[p(1.0, 0.3), p(1.5, 0.4)]) - 1.0).abs() < 1e-12);
        assert_eq!(worst_rise(&[p(0.0, 0.0), p(1.0, 0.0)]), f64::INFINITY);
    }

    #[test]
    fn curves_are_deterministic_and_schedule_free() {
        let ts = small_set();
        let cfg = small_cfg(Method::Inversion);
        let a = run_recovery_curve(&cfg, &ts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_recovery_curve(&cfg, &ts).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|p| p.mean_hamming >= 0.0 && p.stderr >= 0.0 && p.reps == 20));
    }

    #[test]
    fn one_point_sweep_equals_curve_cell() {
        let ts = small_set();
        let cfg = ExperimentConfig { l_grid: vec![4], gamma: 0.7, ..small_cfg(Method::Inversion) };
        let curve = run_recovery_curve(&cfg, &ts).unwrap();
        let sweep = run_gamma_sweep(&cfg, &ts, &[0.7]).unwrap();
        assert_eq!(curve[0].mean_hamming, sweep[0].mean_hamming);
        assert_eq!(curve[0].stderr, sweep[0].stderr);
        assert_eq!(sweep[0].key, 0.7);
        assert!(run_gamma_sweep(&small_cfg(Method::Inversion), &ts, &[1.0]).is_err());
        assert!(run_gamma_sweep(&ExperimentConfig { method: Method::Iterative, ..cfg }, &ts, &[1.0]).is_err());
    }

    #[test]
    fn quantum_method_runs_on_tiny_networks() {
        let ts = TrainingSet::new(vec![ActivationPattern::from_signs(&[1, -1, -1, 1]).unwrap()]).unwrap();
        let cfg = ExperimentConfig {
            d: 4,
            m: 1,
            reps: 3,
            l_grid: vec![3],
            units: Units::Neurons,
            mu: 0.05,
            ..ExperimentConfig::fixture(Method::Quantum)
        };
        let q = run_recovery_curve(&cfg, &ts).unwrap();
        assert_eq!(q[0].mean_hamming, 0.0);
    }
}
