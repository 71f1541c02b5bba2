//! Iterative recall: asynchronous threshold updates on a binary state.

use alloc::vec::Vec;

use rand::Rng as _;

use crate::hebbian::WeightMatrix;
use crate::linalg::dot;
use crate::patterns::ActivationPattern;
use crate::rng;
use crate::{Error, Result, Warning};

/// Per-neuron firing thresholds θ.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    theta: Vec<f64>,
}

impl Thresholds {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidEntry { index: i + 1, value: theta[i] });
        }
        Ok(Self { theta })
    }

    pub fn zeros(d: usize) -> Self {
        Self { theta: alloc::vec![0.0; d] }
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    /// Thresholds should be of order at most 1; larger ones are allowed but
    /// reported.
    pub fn warnings(&self) -> Vec<Warning> {
        self.theta
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > 1.0)
            .map(|(i, &value)| Warning::LargeThreshold { index: i + 1, value })
            .collect()
    }
}

fn check_dims(w: &WeightMatrix, x: &ActivationPattern, theta: &Thresholds) -> Result<()> {
    let d = w.dim();
    for found in [x.dim(), theta.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    Ok(())
}

/// `E = −½ xᵀWx + θᵀx`.
pub fn energy(w: &WeightMatrix, x: &ActivationPattern, theta: &Thresholds) -> Result<f64> {
    check_dims(w, x, theta)?;
    let wx = w.matrix().matvec(x.values());
    Ok(-0.5 * dot(x.values(), &wx) + dot(theta.values(), x.values()))
}

#[inline]
fn field(w: &WeightMatrix, x: &[f64], i: usize) -> f64 {
    dot(w.matrix().row(i), x)
}

#[inline]
fn rule(field: f64, theta: f64) -> f64 {
    if field >= theta {
        1.0
    } else {
        -1.0
    }
}

/// Applies the threshold rule to neuron `i` (1-based). A field exactly equal
/// to the threshold sets the neuron to +1.
pub fn update_neuron(
    w: &WeightMatrix,
    x: &ActivationPattern,
    theta: &Thresholds,
    i: usize,
) -> Result<ActivationPattern> {
    check_dims(w, x, theta)?;
    x.require_binary()?;
    let d = w.dim();
    if i == 0 || i > d {
        return Err(Error::IndexOutOfRange { index: i, dim: d });
    }
    let mut v = x.values().to_vec();
    v[i - 1] = rule(field(w, &v, i - 1), theta.values()[i - 1]);
    ActivationPattern::binary(v)
}

/// True when no single update would change `x`.
pub fn is_fixed_point(w: &WeightMatrix, x: &ActivationPattern, theta: &Thresholds) -> Result<bool> {
    check_dims(w, x, theta)?;
    x.require_binary()?;
    Ok(first_unstable(w, x.values(), theta.values()).is_none())
}

fn first_unstable(w: &WeightMatrix, x: &[f64], theta: &[f64]) -> Option<usize> {
    (0..x.len()).find(|&i| rule(field(w, x, i), theta[i]) != x[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateOrder {
    /// Each update picks a neuron uniformly at random.
    #[default]
    Random,
    /// Neurons 1, 2, …, d, 1, 2, …
    Sequential,
}

/// What to put in place of unknown (0) neurons before iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroFill {
    #[default]
    Plus,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecallOptions {
    pub max_sweeps: usize,
    pub order: UpdateOrder,
    pub zero_fill: ZeroFill,
}

impl Default for RecallOptions {
    fn default() -> Self {
        Self { max_sweeps: 100, order: UpdateOrder::Random, zero_fill: ZeroFill::Plus }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecallTrace {
    pub state: ActivationPattern,
    /// Sweeps started, one sweep being `d` updates.
    pub sweeps: usize,
    /// Energy at the start and after every sweep.
    pub energy_history: Vec<f64>,
    pub converged: bool,
    pub updates: usize,
}

/// Random-order recall with unknown neurons filled with +1.
pub fn recall(
    w: &WeightMatrix,
    start: &ActivationPattern,
    theta: &Thresholds,
    seed: u64,
    max_sweeps: usize,
) -> Result<RecallTrace> {
    recall_with(w, start, theta, seed, RecallOptions { max_sweeps, ..Default::default() })
}

/// Runs updates until `d` consecutive ones change nothing and a full scan
/// confirms a fixed point, or until `max_sweeps · d` updates have been spent.
pub fn recall_with(
    w: &WeightMatrix,
    start: &ActivationPattern,
    theta: &Thresholds,
    seed: u64,
    opts: RecallOptions,
) -> Result<RecallTrace> {
    check_dims(w, start, theta)?;
    let mut probe = start.values().to_vec();
    if let Some(i) = probe.iter().position(|&v| v != 1.0 && v != -1.0 && v != 0.0) {
        return Err(Error::InvalidEntry { index: i + 1, value: probe[i] });
    }
    let d = w.dim();
    let th = theta.values();
    let mut rng = rng::from_seed(seed);
    for v in probe.iter_mut().filter(|v| **v == 0.0) {
        *v = match opts.zero_fill {
            ZeroFill::Plus => 1.0,
            ZeroFill::Random => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        };
    }
    let mut x = probe;

    let budget = opts.max_sweeps.saturating_mul(d);
    // Tracked incrementally: each accepted flip lowers E by (h_i − θ_i)·Δx_i ≥ 0,
    // so the recorded history cannot go up through rounding.
    let wx = w.matrix().matvec(&x);
    let mut e = -0.5 * dot(&x, &wx) + dot(th, &x);
    let mut energy_history = alloc::vec![e];
    let mut quiet = 0usize;
    let mut updates = 0usize;
    let mut converged = false;

    while updates < budget {
        let i = match opts.order {
            UpdateOrder::Random => rng.gen_range(0..d),
            UpdateOrder::Sequential => updates % d,
        };
        let h = field(w, &x, i);
        let new = rule(h, th[i]);
        updates += 1;
        if new != x[i] {
            e -= (h - th[i]) * (new - x[i]);
            x[i] = new;
            quiet = 0;
        } else {
            quiet += 1;
        }
        if updates.is_multiple_of(d) {
            energy_history.push(e);
        }
        if quiet >= d {
            if first_unstable(w, &x, th).is_none() {
                converged = true;
                break;
            }
            quiet = 0;
        }
    }
    if !updates.is_multiple_of(d) {
        energy_history.push(e);
    }
    Ok(RecallTrace {
        state: ActivationPattern::binary(x)?,
        sweeps: updates.div_ceil(d),
        energy_history,
        converged,
        updates,
    })
}
