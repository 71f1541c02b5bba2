//! Phase estimation of a Hermitian generator given as an evolution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::cmatrix::{cnorm2, CMatrix, C64};
use super::register::QuantumRegister;
use crate::linalg::{Matrix, SymmetricEigen};
use crate::{Error, Result, Warning};

pub const MAX_PHASE_QUBITS: usize = 12;

/// Something that can produce `e^{iHt}` for a fixed Hermitian `H`.
pub trait Evolution {
    /// Hilbert-space dimension (a power of two).
    fn dim(&self) -> usize;
    fn unitary(&self, time: f64) -> Result<CMatrix>;
    /// An interval known to contain every eigenvalue of `H`.
    fn spectral_bounds(&self) -> (f64, f64);
}

/// Exact exponentials of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct ExactEvolution {
    eig: SymmetricEigen,
}

impl ExactEvolution {
    pub fn new(h: &Matrix) -> Result<Self> {
        if !h.rows().is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: h.rows().next_power_of_two(), found: h.rows() });
        }
        Ok(Self { eig: SymmetricEigen::new(h)? })
    }
}

impl Evolution for ExactEvolution {
    fn dim(&self) -> usize {
        self.eig.values().len()
    }

    fn unitary(&self, time: f64) -> Result<CMatrix> {
        Ok(CMatrix::exp_i_from_eigen(&self.eig, time))
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        let v = self.eig.values();
        (v[0], v[v.len() - 1])
    }
}

/// How phases map back to eigenvalues: `U = e^{iHt₀}`, so eigenvalue μ sits
/// at phase `μ t₀ / 2π`. Signed scales read the upper half of the bins as
/// negative (two's complement).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseScale {
    pub t0: f64,
    pub signed: bool,
}

impl PhaseScale {
    pub fn unsigned(t0: f64) -> Self {
        Self { t0, signed: false }
    }

    pub fn signed(t0: f64) -> Self {
        Self { t0, signed: true }
    }

    /// Signed scale whose window is `[−bound, bound)`.
    pub fn for_bound(bound: f64) -> Self {
        Self::signed(PI / bound)
    }

    pub fn full_scale(&self) -> f64 {
        2.0 * PI / self.t0
    }

    pub fn resolution(&self, phase_qubits: usize) -> f64 {
        self.full_scale() / (1u64 << phase_qubits) as f64
    }

    /// `[lo, hi)` of representable eigenvalues.
    pub fn window(&self) -> (f64, f64) {
        let f = self.full_scale();
        if self.signed {
            (-f / 2.0, f / 2.0)
        } else {
            (0.0, f)
        }
    }

    pub fn eigenvalue(&self, bin: usize, phase_qubits: usize) -> f64 {
        let k = 1usize << phase_qubits;
        let b = if self.signed && bin >= k / 2 { bin as f64 - k as f64 } else { bin as f64 };
        b * self.resolution(phase_qubits)
    }

    fn aliasing(&self, (lo, hi): (f64, f64)) -> Option<Warning> {
        let (wlo, whi) = self.window();
        if lo < wlo || hi >= whi {
            let bound = if self.signed { lo.abs().max(hi.abs()) } else { hi.max(-lo) };
            let window = if self.signed { whi } else { whi - wlo };
            Some(Warning::Aliasing { bound, window })
        } else {
            None
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t0.is_finite() && self.t0 > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter { name: "t0", value: self.t0 })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinEstimate {
    pub bin: usize,
    pub eigenvalue: f64,
    pub probability: f64,
}

/// Distribution over the phase register after estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenReadout {
    /// One entry per bin, in bin order.
    pub estimates: Vec<BinEstimate>,
    pub phase_qubits: usize,
    pub scale: PhaseScale,
    pub resolution: f64,
    pub warnings: Vec<Warning>,
}

impl EigenReadout {
    pub fn peak(&self) -> BinEstimate {
        *self.estimates.iter().max_by(|a, b| a.probability.total_cmp(&b.probability)).expect("at least two bins")
    }

    pub(crate) fn from_register(
        reg: &QuantumRegister,
        phase_qubits: usize,
        scale: PhaseScale,
        warnings: Vec<Warning>,
    ) -> Result<Self> {
        let estimates = reg
            .marginal("phase")?
            .into_iter()
            .enumerate()
            .map(|(bin, probability)| BinEstimate { bin, eigenvalue: scale.eigenvalue(bin, phase_qubits), probability })
            .collect();
        Ok(Self { estimates, phase_qubits, resolution: scale.resolution(phase_qubits), scale, warnings })
    }
}

pub(crate) fn check_phase_qubits(t: usize) -> Result<()> {
    if t == 0 || t > MAX_PHASE_QUBITS {
        return Err(Error::PhaseQubitsOutOfRange { requested: t, max: MAX_PHASE_QUBITS });
    }
    Ok(())
}

/// `U^{2^p}` for `p = 0..t`, with `U = e^{iHt₀}`.
pub(crate) fn controlled_powers(gen: &dyn Evolution, scale: PhaseScale, t: usize) -> Result<Vec<CMatrix>> {
    let mut powers = Vec::with_capacity(t);
    let mut u = gen.unitary(scale.t0)?;
    for p in 0..t {
        if p > 0 {
            u = u.matmul(&u);
        }
        powers.push(u.clone());
    }
    Ok(powers)
}

/// Hadamards, controlled powers on `target`, inverse QFT.
pub(crate) fn forward(reg: &mut QuantumRegister, target: &'static str, powers: &[CMatrix]) -> Result<()> {
    reg.hadamard_all("phase")?;
    apply_powers(reg, target, powers)?;
    reg.qft("phase", true)
}

/// Exact inverse of [`forward`], given the adjoint powers.
pub(crate) fn backward(reg: &mut QuantumRegister, target: &'static str, adjoints: &[CMatrix]) -> Result<()> {
    reg.qft("phase", false)?;
    apply_powers(reg, target, adjoints)?;
    reg.hadamard_all("phase")
}

fn apply_powers(reg: &mut QuantumRegister, target: &'static str, powers: &[CMatrix]) -> Result<()> {
    for (p, u) in powers.iter().enumerate() {
        reg.apply_conditioned(Some("phase"), target, |k| ((k >> p) & 1 == 1).then_some(u))?;
    }
    Ok(())
}

/// Standard phase estimation with `t` phase qubits on `input`, which is
/// normalised first.
pub fn phase_estimate(gen: &dyn Evolution, input: &[C64], t: usize, scale: PhaseScale) -> Result<EigenReadout> {
    check_phase_qubits(t)?;
    scale.validate()?;
    let dim = gen.dim();
    if input.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: input.len() });
    }
    if cnorm2(input) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let sys = dim.trailing_zeros() as usize;
    let mut amps = vec![C64::new(0.0, 0.0); dim << t];
    amps[..dim].copy_from_slice(input);
    let mut reg = QuantumRegister::from_amplitudes(&[("phase", t), ("system", sys)], amps)?;
    let powers = controlled_powers(gen, scale, t)?;
    forward(&mut reg, "system", &powers)?;
    let warnings = scale.aliasing(gen.spectral_bounds()).into_iter().collect();
    EigenReadout::from_register(&reg, t, scale, warnings)
}
