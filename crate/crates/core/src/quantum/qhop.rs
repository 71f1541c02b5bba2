//! The full quantum recall pipeline on a simulated register:
//! encode `w`, estimate eigenphases of `A`, rotate a flag ancilla by
//! `μ/μ̃` on kept eigenvalues, uncompute, and post-select.

use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Bernoulli, Distribution};

use super::cmatrix::{inner, CMatrix, C64, ZERO};
use super::phase::{backward, check_phase_qubits, controlled_powers, forward, EigenReadout, Evolution, PhaseScale};
use super::register::{embed_w, qubits_for, QuantumRegister};
use super::split::{EvolutionMode, SplitEvolution};
use crate::classical::Thresholds;
use crate::hebbian::{DensityMatrix, WeightMatrix};
use crate::inversion::discretize;
use crate::patterns::{ActivationPattern, ClampSet, TrainingSet};
use crate::rng;
use crate::{Error, Result, Warning};

/// Total qubits allowed: phase, system and two ancillas.
pub const QUBIT_CAP: usize = 16;

/// Where ρ comes from.
#[derive(Debug, Clone, Copy)]
pub enum HebbianSource<'a> {
    Patterns(&'a TrainingSet),
    Density(&'a DensityMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QhopConfig {
    pub gamma: f64,
    /// Filter threshold; also the rotation constant.
    pub mu: f64,
    pub phase_qubits: usize,
    pub mode: EvolutionMode,
    /// Overrides the split step size.
    pub max_step: Option<f64>,
    /// Measurement shots for sampled probabilities; 0 skips sampling.
    pub shots: u64,
    pub seed: u64,
    pub diagnostics: bool,
}

impl Default for QhopConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            mu: 0.05,
            phase_qubits: 9,
            mode: EvolutionMode::Reference,
            max_step: None,
            shots: 0,
            seed: 0,
            diagnostics: false,
        }
    }
}

/// Register summary taken after one pipeline stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub label: &'static str,
    pub sub_register: &'static str,
    pub norm: f64,
    pub top: Vec<(usize, C64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QhopReport {
    /// System state conditioned on flag = 1 and phase = 0.
    pub state: QuantumRegister,
    /// Normalised x block of `state` (unpadded).
    pub x: Vec<C64>,
    /// `x` rotated to a real global phase.
    pub x_real: Vec<f64>,
    pub discretized: ActivationPattern,
    /// Probability that the filter ancilla reads 1.
    pub success_probability: f64,
    /// `|x|²/(|x|² + |λ|²)` within the post-selected state.
    pub postselect_probability: f64,
    /// `1 − P(phase = 0 | flag = 1)` after uncomputation.
    pub phase_residual: f64,
    pub sampled_success: Option<f64>,
    pub sampled_postselect: Option<f64>,
    pub readout: EigenReadout,
    pub kept_bins: usize,
    pub resolution: f64,
    pub gamma_prime: f64,
    pub w_norm: f64,
    pub qubits: usize,
    pub warnings: Vec<Warning>,
    pub snapshots: Vec<Snapshot>,
}

impl QhopReport {
    /// `|⟨x̂|c/|c|⟩|²` against a classical solution.
    pub fn fidelity_with(&self, classical: &[f64]) -> f64 {
        let n = libm::sqrt(classical.iter().map(|v| v * v).sum::<f64>());
        let c: Vec<C64> = classical.iter().map(|&v| C64::new(v / n, 0.0)).collect();
        inner(&self.x, &c).norm_sqr()
    }
}

const LAYOUT_LABEL: &str = "phase|flag|system";

fn snapshot(out: &mut Vec<Snapshot>, on: bool, label: &'static str, reg: &QuantumRegister) {
    if on {
        out.push(Snapshot {
            step: out.len(),
            label,
            sub_register: LAYOUT_LABEL,
            norm: reg.norm(),
            top: reg.top_amplitudes(8),
        });
    }
}

/// Filter rotation on the flag for one bin: `|0⟩ ↦ √(1−a²)|0⟩ + a|1⟩` with
/// `a = μ/μ̃`, or nothing if the bin is filtered out.
fn rotation(mu: f64, estimate: f64) -> Option<CMatrix> {
    if estimate.abs() < mu {
        return None;
    }
    let a = mu / estimate;
    let c = libm::sqrt(1.0 - a * a);
    let mut r = CMatrix::zeros(2, 2);
    r[(0, 0)] = C64::new(c, 0.0);
    r[(1, 0)] = C64::new(a, 0.0);
    r[(0, 1)] = C64::new(-a, 0.0);
    r[(1, 1)] = C64::new(c, 0.0);
    Some(r)
}

pub fn qhop_solve(
    source: HebbianSource<'_>,
    clamp: &ClampSet,
    theta: &Thresholds,
    config: &QhopConfig,
) -> Result<QhopReport> {
    let QhopConfig { gamma, mu, phase_qubits: t, .. } = *config;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter { name: "gamma", value: gamma });
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidParameter { name: "mu", value: mu });
    }
    check_phase_qubits(t)?;
    let d = clamp.dim();
    let n = qubits_for(d);
    let dp = 1usize << n;
    let qubits = t + (n + 1) + 2;
    if qubits > QUBIT_CAP {
        return Err(Error::QubitCapExceeded { required: qubits, cap: QUBIT_CAP });
    }
    if clamp.is_empty() {
        return Err(Error::EmptyClamp);
    }

    let (evo, weights) = match (source, config.mode) {
        (HebbianSource::Patterns(ts), mode) => {
            (SplitEvolution::new(ts, clamp, gamma, mode)?, crate::hebbian::train(ts)?)
        }
        (HebbianSource::Density(rho), EvolutionMode::Reference) => {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: rho.dim() });
            }
            (SplitEvolution::reference(rho, clamp, gamma)?, rho.weights()?)
        }
        (HebbianSource::Density(_), EvolutionMode::Hebbian) => return Err(Error::PatternsRequired),
    };
    let evo = match config.max_step {
        Some(s) => evo.with_max_step(s)?,
        None => evo,
    };
    let mut warnings = upfront_warnings(&weights, theta, gamma);

    let (w_reg, w_norm) = embed_w(theta, clamp)?;
    let scale = PhaseScale::for_bound(gamma + 2.0);
    let resolution = scale.resolution(t);
    if resolution > mu {
        warnings.push(Warning::CoarsePhaseGrid { resolution, mu });
    }
    let (lo, hi) = evo.spectral_bounds();
    let (wlo, whi) = scale.window();
    if lo < wlo || hi >= whi {
        warnings.push(Warning::Aliasing { bound: hi.max(-lo), window: whi });
    }

    let sys_dim = 2 * dp;
    let mut amps = vec![ZERO; sys_dim << (t + 1)];
    amps[..sys_dim].copy_from_slice(w_reg.amplitudes());
    let mut reg = QuantumRegister::from_amplitudes(&[("phase", t), ("flag", 1), ("system", n + 1)], amps)?;
    let mut snaps = Vec::new();
    let diag = config.diagnostics;
    snapshot(&mut snaps, diag, "embed", &reg);

    let powers = controlled_powers(&evo, scale, t)?;
    forward(&mut reg, "system", &powers)?;
    snapshot(&mut snaps, diag, "phase estimation", &reg);
    let readout = EigenReadout::from_register(&reg, t, scale, Vec::new())?;

    let rotations: Vec<Option<CMatrix>> = readout.estimates.iter().map(|e| rotation(mu, e.eigenvalue)).collect();
    let kept_bins = rotations.iter().filter(|r| r.is_some()).count();
    reg.apply_conditioned(Some("phase"), "flag", |k| rotations[k].as_ref())?;
    snapshot(&mut snaps, diag, "rotation", &reg);

    let adjoints: Vec<CMatrix> = powers.iter().map(CMatrix::adjoint).collect();
    backward(&mut reg, "system", &adjoints)?;
    snapshot(&mut snaps, diag, "uncompute", &reg);

    let no_success = |p: f64| Error::NoSuccess { success_probability: p, kept_bins, resolution };
    let (success_probability, flagged) = reg.postselect("flag", 1)?;
    let flagged = match flagged {
        Some(f) if success_probability > 1e-300 => f,
        _ => return Err(no_success(success_probability)),
    };
    let (p_phase0, state) = flagged.postselect("phase", 0)?;
    let state = state.ok_or_else(|| no_success(success_probability))?;
    let phase_residual = (1.0 - p_phase0).max(0.0);

    let a = state.amplitudes();
    let x_raw = &a[..d];
    let lambda_raw = &a[dp..dp + d];
    let x_sq: f64 = x_raw.iter().map(|v| v.norm_sqr()).sum();
    let l_sq: f64 = lambda_raw.iter().map(|v| v.norm_sqr()).sum();
    if x_sq == 0.0 {
        return Err(no_success(success_probability));
    }
    let postselect_probability = x_sq / (x_sq + l_sq);
    let xn = libm::sqrt(x_sq);
    let x: Vec<C64> = x_raw.iter().map(|v| v / xn).collect();
    let x_real = real_phase(&x, clamp);
    let discretized = discretize(&ActivationPattern::new(x_real.clone())?);

    let (sampled_success, sampled_postselect) = if config.shots > 0 {
        let mut r = rng::from_seed(config.seed);
        let draw = |p: f64, shots: u64, r: &mut rng::Rng| -> u64 {
            let b = Bernoulli::new(p.clamp(0.0, 1.0)).expect("probability in range");
            (0..shots).filter(|_| b.sample(r)).count() as u64
        };
        let hits = draw(success_probability, config.shots, &mut r);
        let kept = draw(postselect_probability, hits, &mut r);
        let frac = (hits > 0).then(|| kept as f64 / hits as f64);
        (Some(hits as f64 / config.shots as f64), frac)
    } else {
        (None, None)
    };

    Ok(QhopReport {
        state,
        x,
        x_real,
        discretized,
        success_probability,
        postselect_probability,
        phase_residual,
        sampled_success,
        sampled_postselect,
        readout,
        kept_bins,
        resolution,
        gamma_prime: evo.gamma_prime(),
        w_norm,
        qubits,
        warnings,
        snapshots: snaps,
    })
}

fn upfront_warnings(w: &WeightMatrix, theta: &Thresholds, gamma: f64) -> Vec<Warning> {
    let mut out = Vec::new();
    if gamma <= w.spectral_norm() {
        out.push(Warning::GammaBelowNorm { gamma, norm: w.spectral_norm() });
    }
    if gamma < 1.0 {
        out.push(Warning::GammaBelowOne { gamma });
    }
    out.extend(theta.warnings());
    out
}

/// Removes the global phase so that `Σ_{i∈𝓛} x_inc,i · x_i` is real and
/// positive, then keeps the real part.
fn real_phase(x: &[C64], clamp: &ClampSet) -> Vec<f64> {
    let anchor: C64 = clamp.indices().iter().map(|&i| x[i - 1] * clamp.values()[i - 1]).sum();
    let anchor = if anchor.norm() > 0.0 {
        anchor
    } else {
        x.iter().copied().max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr())).unwrap_or(C64::new(1.0, 0.0))
    };
    let rot = anchor.conj() / anchor.norm();
    x.iter().map(|v| (v * rot).re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::{assemble, solve_spectral};
    use rand::Rng;

    fn ts(rows: &[&[i8]]) -> TrainingSet {
        TrainingSet::new(rows.iter().map(|r| ActivationPattern::from_signs(r).unwrap()).collect()).unwrap()
    }

    fn config(t: usize) -> QhopConfig {
        QhopConfig { phase_qubits: t, ..QhopConfig::default() }
    }

    #[test]
    fn worked_two_neuron_system() {
        let set = ts(&[&[1, 1]]);
        let clamp = ClampSet::new(&[1], &[1.0, 0.0]).unwrap();
        let th = Thresholds::zeros(2);
        let r = qhop_solve(HebbianSource::Patterns(&set), &clamp, &th, &config(8)).unwrap();
        let classical = [1.0, 0.5];
        assert!(r.fidelity_with(&classical) >= 0.99, "{}", r.fidelity_with(&classical));
        assert!((r.x_real[0] - 0.894).abs() < 0.02 && (r.x_real[1] - 0.447).abs() < 0.02);
        let want = 1.25 / (1.25 + 0.75 * 0.75);
        assert!((r.postselect_probability - want).abs() < 0.02);
        assert_eq!(r.gamma_prime, 1.5);
        assert_eq!(r.qubits, 8 + 2 + 2);
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        assert!((r.state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn missing_neuron_is_restored() {
        let x = [1i8, -1, -1, 1];
        let set = ts(&[&x]);
        let p = ActivationPattern::from_signs(&x).unwrap();
        let clamp = ClampSet::new(&[1, 2, 4], p.values()).unwrap();
        let r = qhop_solve(HebbianSource::Patterns(&set), &clamp, &Thresholds::zeros(4), &config(9)).unwrap();
        assert_eq!(r.discretized, p);
    }

    #[test]
    fn density_source_and_sampling() {
        let set = ts(&[&[1, 1]]);
        let rho = crate::hebbian::density(&set).unwrap();
        let clamp = ClampSet::new(&[1], &[1.0, 0.0]).unwrap();
        let th = Thresholds::zeros(2);
        let cfg = QhopConfig { shots: 20_000, seed: 5, diagnostics: true, ..config(8) };
        let a = qhop_solve(HebbianSource::Density(&rho), &clamp, &th, &cfg).unwrap();
        let b = qhop_solve(HebbianSource::Patterns(&set), &clamp, &th, &cfg).unwrap();
        assert!(a.state.max_abs_diff(&b.state) < 1e-12);
        let s = a.sampled_success.unwrap();
        let se = libm::sqrt(a.success_probability * (1.0 - a.success_probability) / 20_000.0);
        assert!((s - a.success_probability).abs() < 4.0 * se + 1e-12);
        assert_eq!(a.snapshots.len(), 4);
        for snap in &a.snapshots {
            assert!((snap.norm - 1.0).abs() < 1e-10);
            assert_eq!(snap.top.len(), 8);
        }
        let hebb = QhopConfig { mode: EvolutionMode::Hebbian, ..cfg };
        assert_eq!(qhop_solve(HebbianSource::Density(&rho), &clamp, &th, &hebb).unwrap_err(), Error::PatternsRequired);
    }

    #[test]
    fn hebbian_mode_agrees_with_reference_mode() {
        let set = ts(&[&[1, 1, -1, 1], &[1, -1, 1, 1]]);
        let clamp = ClampSet::new(&[1, 3], set.patterns()[0].values()).unwrap();
        let th = Thresholds::zeros(4);
        let r = qhop_solve(HebbianSource::Patterns(&set), &clamp, &th, &config(7)).unwrap();
        let cfg = QhopConfig { mode: EvolutionMode::Hebbian, ..config(7) };
        let h = qhop_solve(HebbianSource::Patterns(&set), &clamp, &th, &cfg).unwrap();
        assert!(inner(&r.x, &h.x).norm_sqr() > 0.999);
        assert!((r.success_probability - h.success_probability).abs() < 1e-3);
    }

    #[test]
    fn rejections_and_warnings() {
        let set = ts(&[&[1, 1]]);
        let clamp = ClampSet::new(&[1], &[1.0, 0.0]).unwrap();
        let th = Thresholds::zeros(2);
        let src = HebbianSource::Patterns(&set);
        assert!(matches!(qhop_solve(src, &clamp, &th, &config(13)), Err(Error::PhaseQubitsOutOfRange { .. })));
        let cfg = QhopConfig { mu: 0.0, ..config(6) };
        assert!(qhop_solve(src, &clamp, &th, &cfg).is_err());
        let coarse = qhop_solve(src, &clamp, &th, &config(4)).unwrap();
        assert!(coarse.warnings.iter().any(|w| matches!(w, Warning::CoarsePhaseGrid { .. })));

        let big = TrainingSet::new(vec![ActivationPattern::binary(vec![1.0; 64]).unwrap()]).unwrap();
        let c = ClampSet::new(&[1], &[1.0; 64]).unwrap();
        assert_eq!(
            qhop_solve(HebbianSource::Patterns(&big), &c, &Thresholds::zeros(64), &config(8)).unwrap_err(),
            Error::QubitCapExceeded { required: 17, cap: QUBIT_CAP }
        );

        // μ above every eigenvalue magnitude: nothing survives the filter.
        let cfg = QhopConfig { mu: 10.0, ..config(6) };
        assert!(matches!(qhop_solve(src, &clamp, &th, &cfg), Err(Error::NoSuccess { kept_bins: 0, .. })));
    }

    #[test]
    fn uncompute_leaves_little_in_the_phase_register() {
        let set = ts(&[&[1, 1]]);
        let clamp = ClampSet::new(&[1], &[1.0, 0.0]).unwrap();
        let th = Thresholds::zeros(2);
        let w = crate::hebbian::train(&set).unwrap();
        let spec = crate::linalg::SymmetricEigen::new(assemble(&w, &clamp, &th, 1.0).unwrap().matrix()).unwrap();
        for t in [9, 10] {
            let r = qhop_solve(HebbianSource::Patterns(&set), &clamp, &th, &config(t)).unwrap();
            assert!((0.0..=1.0).contains(&r.phase_residual));
            // Leakage into the phase register comes from eigenvalues between
            // grid points; with every eigenvalue near a bin centre it is small.
            let off = spec
                .values()
                .iter()
                .filter(|v| v.abs() > 1e-9)
                .map(|v| (v / r.resolution - libm::round(v / r.resolution)).abs())
                .fold(0.0, f64::max);
            if off <= 0.2 {
                assert!(r.phase_residual <= 1e-2, "T={t}: {}", r.phase_residual);
            }
        }
    }

    #[test]
    fn matches_classical_truncated_solve_on_random_instances() {
        for d in [2usize, 4] {
            for seed in 0..10u64 {
                let mut rng = crate::rng::from_seed(crate::rng::stream_seed(seed, &[d as u64]));
                let m = rng.gen_range(1..=3);
                let pats: Vec<ActivationPattern> = (0..m)
                    .map(|_| {
                        ActivationPattern::binary((0..d).map(|_| if rng.gen() { 1.0 } else { -1.0 }).collect()).unwrap()
                    })
                    .collect();
                let set = TrainingSet::new(pats).unwrap();
                let l = rng.gen_range(1..d);
                let keep = crate::patterns::random_keep(d, l, rng.gen()).unwrap();
                let clamp = ClampSet::new(&keep, set.patterns()[0].values()).unwrap();
                let th = if seed % 2 == 0 {
                    Thresholds::zeros(d)
                } else {
                    Thresholds::new((0..d).map(|_| rng.gen_range(-0.3..0.3)).collect()).unwrap()
                };
                let cfg = config(9);
                let q = qhop_solve(HebbianSource::Patterns(&set), &clamp, &th, &cfg).unwrap();
                let w = crate::hebbian::train(&set).unwrap();
                let c = solve_spectral(&assemble(&w, &clamp, &th, cfg.gamma).unwrap(), cfg.mu).unwrap();
                let f = q.fidelity_with(c.x.values());
                assert!(f >= 0.98, "d={d} seed={seed}: fidelity {f}");
            }
        }
    }
}
