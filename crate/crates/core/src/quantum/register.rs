//! State vectors over named sub-registers, and amplitude encoding.

use alloc::vec;
use alloc::vec::Vec;

use super::cmatrix::{cis, cnorm2, inner, CMatrix, C64, ONE, ZERO};
use crate::classical::Thresholds;
use crate::patterns::{ActivationPattern, ClampSet};
use crate::{Error, Result};

/// Number of qubits needed to hold `d` amplitudes, `⌈log₂ d⌉`.
pub fn qubits_for(d: usize) -> usize {
    d.next_power_of_two().trailing_zeros() as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubRegister {
    pub name: &'static str,
    pub qubits: usize,
}

/// A pure state on an ordered list of sub-registers. The first listed
/// sub-register is the most significant part of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRegister {
    layout: Vec<SubRegister>,
    amps: Vec<C64>,
}

impl QuantumRegister {
    /// All qubits in |0⟩.
    pub fn zeros(layout: &[(&'static str, usize)]) -> Self {
        let layout: Vec<SubRegister> = layout.iter().map(|&(name, qubits)| SubRegister { name, qubits }).collect();
        let n: usize = layout.iter().map(|s| s.qubits).sum();
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Self { layout, amps }
    }

    /// Wraps an amplitude vector, normalising it.
    pub fn from_amplitudes(layout: &[(&'static str, usize)], amps: Vec<C64>) -> Result<Self> {
        let mut reg = Self::zeros(layout);
        if amps.len() != reg.amps.len() {
            return Err(Error::DimensionMismatch { expected: reg.amps.len(), found: amps.len() });
        }
        let norm = cnorm2(&amps);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        reg.amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(reg)
    }

    pub fn layout(&self) -> &[SubRegister] {
        &self.layout
    }

    pub fn qubits(&self) -> usize {
        self.layout.iter().map(|s| s.qubits).sum()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        cnorm2(&self.amps)
    }

    /// `(lowest bit, width)` of a sub-register within the basis index.
    pub fn locate(&self, name: &'static str) -> Result<(usize, usize)> {
        let mut below: usize = self.qubits();
        for s in &self.layout {
            below -= s.qubits;
            if s.name == name {
                return Ok((below, s.qubits));
            }
        }
        Err(Error::MissingSubRegister(name))
    }

    /// Value held by sub-register `(lo, width)` in basis index `idx`.
    fn field(idx: usize, (lo, width): (usize, usize)) -> usize {
        (idx >> lo) & ((1 << width) - 1)
    }

    /// Applies `op(value of control)` to the target sub-register, fibre by
    /// fibre; `None` leaves that fibre alone. `control` may be `None` for an
    /// unconditional gate.
    pub fn apply_conditioned<'a>(
        &mut self,
        control: Option<&'static str>,
        target: &'static str,
        op: impl Fn(usize) -> Option<&'a CMatrix>,
    ) -> Result<()> {
        let (lo, width) = self.locate(target)?;
        let ctrl = control.map(|c| self.locate(c)).transpose()?;
        let dim = 1usize << width;
        let mask = (dim - 1) << lo;
        let mut buf = vec![ZERO; dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let value = ctrl.map_or(0, |c| Self::field(base, c));
            let Some(m) = op(value) else { continue };
            assert_eq!(m.rows(), dim, "gate size does not match sub-register {target}");
            for (j, b) in buf.iter_mut().enumerate() {
                *b = self.amps[base | (j << lo)];
            }
            let out = m.matvec(&buf);
            for (j, v) in out.into_iter().enumerate() {
                self.amps[base | (j << lo)] = v;
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, target: &'static str, m: &CMatrix) -> Result<()> {
        self.apply_conditioned(None, target, |_| Some(m))
    }

    /// Hadamard on every qubit of a sub-register.
    pub fn hadamard_all(&mut self, name: &'static str) -> Result<()> {
        let (_, width) = self.locate(name)?;
        self.apply(name, &hadamard_layer(width))
    }

    /// Quantum Fourier transform on a sub-register (`inverse` for QFT†).
    pub fn qft(&mut self, name: &'static str, inverse: bool) -> Result<()> {
        let (_, width) = self.locate(name)?;
        self.apply(name, &qft_matrix(width, inverse))
    }

    /// Marginal distribution of a sub-register.
    pub fn marginal(&self, name: &'static str) -> Result<Vec<f64>> {
        let loc = self.locate(name)?;
        let mut p = vec![0.0; 1 << loc.1];
        for (idx, a) in self.amps.iter().enumerate() {
            p[Self::field(idx, loc)] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Probability of `name = value` and the normalised remaining state on
    /// the other sub-registers (`None` if the probability is zero).
    pub fn postselect(&self, name: &'static str, value: usize) -> Result<(f64, Option<Self>)> {
        let (lo, width) = self.locate(name)?;
        let layout: Vec<(&'static str, usize)> =
            self.layout.iter().filter(|s| s.name != name).map(|s| (s.name, s.qubits)).collect();
        let keep: Vec<C64> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| Self::field(*idx, (lo, width)) == value)
            .map(|(_, &a)| a)
            .collect();
        let p: f64 = keep.iter().map(|a| a.norm_sqr()).sum();
        if p == 0.0 {
            return Ok((p, None));
        }
        Ok((p, Some(Self::from_amplitudes(&layout, keep)?)))
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch { expected: self.amps.len(), found: other.amps.len() });
        }
        Ok(inner(&self.amps, &other.amps).norm_sqr())
    }

    /// Largest amplitude difference to a register of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// The `count` largest-magnitude amplitudes, for diagnostics.
    pub fn top_amplitudes(&self, count: usize) -> Vec<(usize, C64)> {
        let mut idx: Vec<usize> = (0..self.amps.len()).collect();
        idx.sort_by(|&a, &b| self.amps[b].norm_sqr().total_cmp(&self.amps[a].norm_sqr()).then(a.cmp(&b)));
        idx.into_iter().take(count).map(|i| (i, self.amps[i])).collect()
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }
}

fn hadamard_layer(width: usize) -> CMatrix {
    let n = 1usize << width;
    let s = 1.0 / libm::sqrt(n as f64);
    CMatrix::from_fn(n, n, |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 { s } else { -s };
        C64::new(sign, 0.0)
    })
}

fn qft_matrix(width: usize, inverse: bool) -> CMatrix {
    let n = 1usize << width;
    let s = 1.0 / libm::sqrt(n as f64);
    let sign = if inverse { -1.0 } else { 1.0 };
    CMatrix::from_fn(n, n, |j, k| {
        let e = (j * k) % n;
        cis(sign * 2.0 * core::f64::consts::PI * e as f64 / n as f64) * s
    })
}

/// Amplitude encoding `x ↦ x/|x|₂`, zero-padded to a power of two.
/// Returns the state on sub-register `"system"` and `|x|₂`.
pub fn embed(x: &ActivationPattern) -> Result<(QuantumRegister, f64)> {
    let d = x.dim();
    let n = qubits_for(d);
    let mut amps = vec![ZERO; 1 << n];
    for (a, &v) in amps.iter_mut().zip(x.values()) {
        *a = C64::new(v, 0.0);
    }
    let norm = libm::sqrt(x.norm_sq());
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((QuantumRegister::from_amplitudes(&[("system", n)], amps)?, norm))
}

/// `|w⟩ ∝ |θ|₂|0⟩|θ⟩ + |x_inc|₂|1⟩|x_inc⟩` on `N + 1` system qubits, with
/// `|w|₂`. Index layout is `block · 2^N + i`.
pub fn embed_w(theta: &Thresholds, clamp: &ClampSet) -> Result<(QuantumRegister, f64)> {
    let d = clamp.dim();
    if theta.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: theta.dim() });
    }
    let n = qubits_for(d);
    let dp = 1usize << n;
    let mut amps = vec![ZERO; 2 * dp];
    for i in 0..d {
        amps[i] = C64::new(theta.values()[i], 0.0);
        amps[dp + i] = C64::new(clamp.values()[i], 0.0);
    }
    let norm = cnorm2(&amps);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((QuantumRegister::from_amplitudes(&[("system", n + 1)], amps)?, norm))
}
