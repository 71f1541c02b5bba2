//! Runs the simulated quantum recall next to the classical truncated solve
//! on identical small instances.

use hopfield_core::classical::Thresholds;
use hopfield_core::inversion::{assemble, solve_spectral};
use hopfield_core::patterns::random_keep;
use hopfield_core::quantum::register::qubits_for;
use hopfield_core::quantum::{qhop_solve, EvolutionMode, HebbianSource, QhopConfig};
use hopfield_core::rng::{from_seed, stream_seed};
use hopfield_core::{hebbian, ActivationPattern, ClampSet, Error, TrainingSet};
use rand::Rng;
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct QcheckConfig {
    pub d: usize,
    pub seeds: u64,
    pub phase_qubits: usize,
    pub gamma: f64,
    pub mu: f64,
    pub mode: EvolutionMode,
    pub seed: u64,
    pub min_fidelity: f64,
    pub postselect_tolerance: f64,
}

impl Default for QcheckConfig {
    fn default() -> Self {
        Self {
            d: 4,
            seeds: 10,
            phase_qubits: 9,
            gamma: 1.0,
            mu: 0.05,
            mode: EvolutionMode::Reference,
            seed: 0,
            min_fidelity: 0.98,
            postselect_tolerance: 0.02,
        }
    }
}

/// One instance: its patterns, clamp and thresholds.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub set: TrainingSet,
    pub clamp: ClampSet,
    pub theta: Thresholds,
}

/// Stores `(+1, +1)` and clamps neuron 1; the classical answer is `(1, 1/2)`.
pub fn worked_instance() -> Instance {
    let set = TrainingSet::new(vec![ActivationPattern::from_signs(&[1, 1]).unwrap()]).unwrap();
    Instance {
        label: "worked".into(),
        clamp: ClampSet::new(&[1], &[1.0, 1.0]).unwrap(),
        set,
        theta: Thresholds::zeros(2),
    }
}

/// 1–3 random patterns, a random clamp of the first one and, on odd
/// indices, small random thresholds.
pub fn random_instance(d: usize, base_seed: u64, index: u64) -> Instance {
    let mut r = from_seed(stream_seed(base_seed, &[d as u64, index]));
    let m = r.gen_range(1..=3);
    let pats = (0..m)
        .map(|_| ActivationPattern::binary((0..d).map(|_| if r.gen() { 1.0 } else { -1.0 }).collect()).unwrap())
        .collect();
    let set = TrainingSet::new(pats).unwrap();
    let l = r.gen_range(1..d);
    let keep = random_keep(d, l, r.gen()).unwrap();
    let clamp = ClampSet::new(&keep, set.patterns()[0].values()).unwrap();
    let theta = if index.is_multiple_of(2) {
        Thresholds::zeros(d)
    } else {
        Thresholds::new((0..d).map(|_| r.gen_range(-0.3..0.3)).collect()).unwrap()
    };
    Instance { label: format!("d{d}-seed{index}"), set, clamp, theta }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcheckRow {
    pub label: String,
    pub d: usize,
    pub qubits: usize,
    pub fidelity: f64,
    pub postselect: f64,
    pub postselect_classical: f64,
    pub success_probability: f64,
    pub phase_residual: f64,
    pub pass: bool,
    /// Warnings, or the reason the quantum run produced nothing.
    pub diagnostic: String,
}

/// Rejects instances over the qubit cap before running anything.
pub fn check_instance(inst: &Instance, cfg: &QcheckConfig) -> Result<QcheckRow, Error> {
    let d = inst.set.dim();
    let qc = QhopConfig {
        gamma: cfg.gamma,
        mu: cfg.mu,
        phase_qubits: cfg.phase_qubits,
        mode: cfg.mode,
        ..Default::default()
    };
    let w = hebbian::train(&inst.set)?;
    let c = solve_spectral(&assemble(&w, &inst.clamp, &inst.theta, cfg.gamma)?, cfg.mu)?;
    let xn: f64 = c.x.values().iter().map(|v| v * v).sum();
    let ln: f64 = c.lambda.iter().map(|v| v * v).sum();
    let postselect_classical = xn / (xn + ln);
    let qubits = cfg.phase_qubits + qubits_for(d) + 1 + 2;
    let mut row = QcheckRow {
        label: inst.label.clone(),
        d,
        qubits,
        fidelity: 0.0,
        postselect: 0.0,
        postselect_classical,
        success_probability: 0.0,
        phase_residual: f64::NAN,
        pass: false,
        diagnostic: String::new(),
    };
    match qhop_solve(HebbianSource::Patterns(&inst.set), &inst.clamp, &inst.theta, &qc) {
        Ok(q) => {
            row.qubits = q.qubits;
            row.fidelity = q.fidelity_with(c.x.values());
            row.postselect = q.postselect_probability;
            row.success_probability = q.success_probability;
            row.phase_residual = q.phase_residual;
            row.diagnostic = q.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("; ");
            row.pass = row.fidelity >= cfg.min_fidelity
                && (row.postselect - postselect_classical).abs() <= cfg.postselect_tolerance;
        }
        Err(e @ Error::NoSuccess { .. }) => row.diagnostic = e.to_string(),
        Err(e) => return Err(e),
    }
    Ok(row)
}

/// `cfg.seeds` random instances of dimension `cfg.d`.
pub fn run_quantum_crosscheck(cfg: &QcheckConfig) -> Result<Vec<QcheckRow>, Error> {
    (0..cfg.seeds).map(|i| check_instance(&random_instance(cfg.d, cfg.seed, i), cfg)).collect()
}

pub fn write_rows<W: Write>(out: W, rows: &[QcheckRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "instance",
        "d",
        "qubits",
        "fidelity",
        "postselect",
        "postselect_classical",
        "success_probability",
        "phase_residual",
        "result",
        "diagnostic",
    ])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.d.to_string(),
            r.qubits.to_string(),
            r.fidelity.to_string(),
            r.postselect.to_string(),
            r.postselect_classical.to_string(),
            r.success_probability.to_string(),
            r.phase_residual.to_string(),
            if r.pass { "PASS" } else { "FAIL" }.to_string(),
            r.diagnostic.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_instance_passes_at_high_fidelity() {
        let cfg = QcheckConfig { min_fidelity: 0.99, ..Default::default() };
        let row = check_instance(&worked_instance(), &cfg).unwrap();
        assert!(row.pass && row.fidelity >= 0.99, "{row:?}");
        assert!((row.postselect_classical - 1.25 / 1.8125).abs() < 1e-12);
    }

    #[test]
    fn tiny_phase_register_fails_with_a_diagnostic() {
        let cfg = QcheckConfig { phase_qubits: 2, ..Default::default() };
        let row = check_instance(&worked_instance(), &cfg).unwrap();
        assert!(!row.pass);
        assert!(!row.diagnostic.is_empty());
    }

    #[test]
    fn qubit_cap_is_a_rejection() {
        let cfg = QcheckConfig { d: 64, seeds: 1, ..Default::default() };
        assert!(matches!(run_quantum_crosscheck(&cfg), Err(Error::QubitCapExceeded { required: 18, .. })));
    }
}
