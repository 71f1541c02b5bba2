//! `e^{iAt}` for the quantum form of the recall matrix, built from the
//! split `A = B + C + D` with
//!
//! * `B = σ_x ⊗ P`, the clamp projector coupling the two halves,
//! * `C = −γ'` on the (unpadded) top half, `γ' = γ + 1/d`,
//! * `D = |0⟩⟨0| ⊗ ρ`.
//!
//! `C` and `D` commute; `B` is combined with them by symmetric (Strang)
//! splitting. System indices are `block · 2^N + i`.

use alloc::vec;
use alloc::vec::Vec;

use super::cmatrix::{cis, CMatrix, C64, ONE};
use super::phase::Evolution;
use super::qheb::{pattern_state, round};
use super::register::qubits_for;
use crate::hebbian::DensityMatrix;
use crate::linalg::{Matrix, SymmetricEigen};
use crate::patterns::{ClampSet, TrainingSet};
use crate::{Error, Result};

/// How the `D` factor is exponentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolutionMode {
    /// Exact `e^{iρΔt}` from an eigendecomposition of ρ.
    #[default]
    Reference,
    /// One round of the per-pattern products per step, run backwards in
    /// time to produce `e^{+iρΔt}`.
    Hebbian,
}

#[derive(Debug, Clone)]
enum DFactor {
    Exact(SymmetricEigen),
    Patterns(Vec<Vec<C64>>),
}

#[derive(Debug, Clone)]
pub struct SplitEvolution {
    d: usize,
    dp: usize,
    gamma: f64,
    known: Vec<bool>,
    rho: Matrix,
    factor: DFactor,
    max_step: f64,
}

pub const DEFAULT_REFERENCE_STEP: f64 = 1e-3;
pub const DEFAULT_HEBBIAN_STEP: f64 = 1e-6;

fn pad(m: &Matrix, dp: usize) -> Matrix {
    Matrix::from_fn(dp, dp, |i, j| if i < m.rows() && j < m.rows() { m[(i, j)] } else { 0.0 })
}

impl SplitEvolution {
    /// Reference mode from ρ (or any real symmetric d × d matrix) and an
    /// explicit known-neuron mask; `P = I` is allowed here.
    pub fn from_parts(rho: &Matrix, known: &[bool], gamma: f64) -> Result<Self> {
        let d = rho.rows();
        if known.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: known.len() });
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter { name: "gamma", value: gamma });
        }
        let dp = 1usize << qubits_for(d);
        let rho = pad(rho, dp);
        let mut mask = vec![false; dp];
        mask[..d].copy_from_slice(known);
        Ok(Self {
            d,
            dp,
            gamma,
            known: mask,
            factor: DFactor::Exact(SymmetricEigen::new(&rho)?),
            rho,
            max_step: DEFAULT_REFERENCE_STEP,
        })
    }

    pub fn reference(rho: &DensityMatrix, clamp: &ClampSet, gamma: f64) -> Result<Self> {
        Self::from_parts(rho.matrix(), &mask(clamp), gamma)
    }

    pub fn hebbian(ts: &TrainingSet, clamp: &ClampSet, gamma: f64) -> Result<Self> {
        let rho = crate::hebbian::density(ts)?;
        let mut s = Self::from_parts(rho.matrix(), &mask(clamp), gamma)?;
        let dp = s.dp;
        s.factor = DFactor::Patterns(ts.patterns().iter().map(|p| pattern_state(p.values(), dp)).collect());
        s.max_step = DEFAULT_HEBBIAN_STEP;
        Ok(s)
    }

    pub fn new(ts: &TrainingSet, clamp: &ClampSet, gamma: f64, mode: EvolutionMode) -> Result<Self> {
        if ts.dim() != clamp.dim() {
            return Err(Error::DimensionMismatch { expected: ts.dim(), found: clamp.dim() });
        }
        match mode {
            EvolutionMode::Reference => Self::reference(&crate::hebbian::density(ts)?, clamp, gamma),
            EvolutionMode::Hebbian => Self::hebbian(ts, clamp, gamma),
        }
    }

    /// Largest step `Δt` used by [`Evolution::unitary`].
    pub fn with_max_step(mut self, max_step: f64) -> Result<Self> {
        if !(max_step.is_finite() && max_step > 0.0) {
            return Err(Error::InvalidParameter { name: "max_step", value: max_step });
        }
        self.max_step = max_step;
        Ok(self)
    }

    pub fn mode(&self) -> EvolutionMode {
        match self.factor {
            DFactor::Exact(_) => EvolutionMode::Reference,
            DFactor::Patterns(_) => EvolutionMode::Hebbian,
        }
    }

    pub fn neurons(&self) -> usize {
        self.d
    }

    /// `γ' = γ + 1/d`.
    pub fn gamma_prime(&self) -> f64 {
        self.gamma + 1.0 / self.d as f64
    }

    /// Dense `(B, C, D)` on the `2·2^N` system space.
    pub fn parts(&self) -> (Matrix, Matrix, Matrix) {
        let (dp, n) = (self.dp, 2 * self.dp);
        let mut b = Matrix::zeros(n, n);
        let mut c = Matrix::zeros(n, n);
        let mut dm = Matrix::zeros(n, n);
        for i in 0..dp {
            if self.known[i] {
                b[(i, dp + i)] = 1.0;
                b[(dp + i, i)] = 1.0;
            }
            if i < self.d {
                c[(i, i)] = -self.gamma_prime();
            }
            for j in 0..dp {
                dm[(i, j)] = self.rho[(i, j)];
            }
        }
        (b, c, dm)
    }

    /// `B + C + D`.
    pub fn assembled(&self) -> Matrix {
        let (b, c, d) = self.parts();
        b.add(&c).add(&d)
    }

    fn exp_b(&self, dt: f64) -> CMatrix {
        let dp = self.dp;
        let mut u = CMatrix::identity(2 * dp);
        let (cos, sin) = (C64::new(libm::cos(dt), 0.0), C64::new(0.0, libm::sin(dt)));
        for i in (0..dp).filter(|&i| self.known[i]) {
            u[(i, i)] = cos;
            u[(dp + i, dp + i)] = cos;
            u[(i, dp + i)] = sin;
            u[(dp + i, i)] = sin;
        }
        u
    }

    /// `e^{iCΔt} e^{iDΔt}`, block diagonal.
    fn exp_cd(&self, dt: f64) -> CMatrix {
        let dp = self.dp;
        let top = match &self.factor {
            DFactor::Exact(eig) => CMatrix::exp_i_from_eigen(eig, dt),
            DFactor::Patterns(states) => round(states, -dt / states.len() as f64),
        };
        let phase = cis(-self.gamma_prime() * dt);
        let mut u = CMatrix::identity(2 * dp);
        for i in 0..dp {
            let p = if i < self.d { phase } else { ONE };
            for j in 0..dp {
                u[(i, j)] = p * top[(i, j)];
            }
        }
        u
    }

    /// One symmetric step `e^{iBΔt/2} e^{i(C+D)Δt} e^{iBΔt/2}`.
    pub fn step(&self, dt: f64) -> CMatrix {
        let half = self.exp_b(dt / 2.0);
        half.matmul(&self.exp_cd(dt)).matmul(&half)
    }

    /// `n` steps of size `t/n`, multiplied by repeated squaring.
    pub fn unitary_with_steps(&self, t: f64, n: u64) -> CMatrix {
        self.step(t / n as f64).pow(n)
    }

    /// Smallest power-of-two step count keeping `|Δt| ≤ max_step`.
    pub fn steps_for(&self, t: f64) -> u64 {
        let want = libm::ceil(t.abs() / self.max_step).max(1.0) as u64;
        want.next_power_of_two()
    }
}

fn mask(clamp: &ClampSet) -> Vec<bool> {
    (1..=clamp.dim()).map(|i| clamp.contains(i)).collect()
}

impl Evolution for SplitEvolution {
    fn dim(&self) -> usize {
        2 * self.dp
    }

    fn unitary(&self, time: f64) -> Result<CMatrix> {
        Ok(self.unitary_with_steps(time, self.steps_for(time)))
    }

    /// `‖ρ − γ'‖ ≤ γ'` and `‖B‖ ≤ 1`.
    fn spectral_bounds(&self) -> (f64, f64) {
        let b = self.gamma_prime() + 1.0;
        (-b, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::Thresholds;
    use crate::hebbian::{density, train};
    use crate::linalg::SpectralDecomposition;
    use crate::patterns::ActivationPattern;

    fn ts(rows: &[&[i8]]) -> TrainingSet {
        TrainingSet::new(rows.iter().map(|r| ActivationPattern::from_signs(r).unwrap()).collect()).unwrap()
    }

    fn dense_exp(a: &Matrix, t: f64) -> CMatrix {
        CMatrix::exp_i_symmetric(a, t).unwrap()
    }

    #[test]
    fn gamma_prime_formula() {
        let set = ts(&[&[1, 1]]);
        let clamp = ClampSet::new(&[1], &[1.0, 0.0]).unwrap();
        let s = SplitEvolution::new(&set, &clamp, 1.0, EvolutionMode::Reference).unwrap();
        assert_eq!(s.gamma_prime(), 1.5);
    }

    #[test]
    fn top_left_block_matches_classical_system() {
        let set = ts(&[&[1, -1, 1, 1, -1], &[1, 1, 1, -1, -1]]);
        let clamp = ClampSet::new(&[1, 3], &[1.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let gamma = 1.0;
        let s = SplitEvolution::reference(&density(&set).unwrap(), &clamp, gamma).unwrap();
        let sys = crate::inversion::assemble(&train(&set).unwrap(), &clamp, &Thresholds::zeros(5), gamma).unwrap();
        let q = s.assembled();
        let (d, dp) = (5, 8);
        for i in 0..d {
            for j in 0..d {
                assert!((q[(i, j)] - sys.matrix()[(i, j)]).abs() <= 1e-15);
                assert_eq!(q[(i, dp + j)], sys.matrix()[(i, d + j)]);
                assert_eq!(q[(dp + i, j)], sys.matrix()[(d + i, j)]);
                assert_eq!(q[(dp + i, dp + j)], 0.0);
            }
        }
        // Padded rows and columns are empty.
        for i in d..dp {
            for j in 0..2 * dp {
                assert_eq!(q[(i, j)], 0.0);
                assert_eq!(q[(dp + i, j)], 0.0);
            }
        }
        let norm = SpectralDecomposition::new(&q).unwrap().spectral_norm();
        assert!(norm <= s.spectral_bounds().1);
    }

    #[test]
    fn reference_split_converges_to_the_dense_exponential() {
        let set = ts(&[&[1, 1]]);
        let clamp = ClampSet::new(&[1], &[1.0, 0.0]).unwrap();
        let s = SplitEvolution::new(&set, &clamp, 1.0, EvolutionMode::Reference).unwrap();
        let exact = dense_exp(&s.assembled(), 1.0);
        let err = s.unitary_with_steps(1.0, 10_000).sub(&exact).op_norm().unwrap();
        assert!(err <= 1e-8, "{err}");
        let coarse = s.unitary_with_steps(1.0, 100).sub(&exact).op_norm().unwrap();
        let finer = s.unitary_with_steps(1.0, 200).sub(&exact).op_norm().unwrap();
        assert!((coarse / finer - 4.0).abs() < 0.1);
    }

    #[test]
    fn c_and_d_always_commute() {
        let set = ts(&[&[1, -1, 1], &[1, 1, -1]]);
        let clamp = ClampSet::new(&[2], &[0.0, 1.0, 0.0]).unwrap();
        let s = SplitEvolution::new(&set, &clamp, 0.7, EvolutionMode::Reference).unwrap();
        let (_, c, d) = s.parts();
        assert!(c.matmul(&d).max_abs_diff(&d.matmul(&c)) < 1e-15);
    }

    #[test]
    fn split_is_exact_when_everything_commutes() {
        // W = 0 (ρ = I/d), every neuron known, γ = 0: C + D vanishes on the
        // top block and A = B.
        let rho = Matrix::identity(2).scale(0.5);
        let s = SplitEvolution::from_parts(&rho, &[true, true], 0.0).unwrap();
        let exact = dense_exp(&s.assembled(), 0.9);
        for n in [1, 2, 7] {
            assert!(s.unitary_with_steps(0.9, n).sub(&exact).op_norm().unwrap() < 1e-12);
        }
        // With γ ≠ 0 the B and C + D factors no longer commute.
        let s = SplitEvolution::from_parts(&rho, &[true, true], 1.0).unwrap();
        let (b, c, d) = s.parts();
        let cd = c.add(&d);
        assert!(b.matmul(&cd).max_abs_diff(&cd.matmul(&b)) > 0.1);
    }

    #[test]
    fn hebbian_mode_tracks_reference_mode() {
        let set = ts(&[&[1, 1, -1, 1], &[1, -1, -1, -1]]);
        let clamp = ClampSet::new(&[1, 2], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        let r = SplitEvolution::new(&set, &clamp, 1.0, EvolutionMode::Reference).unwrap();
        let h = SplitEvolution::new(&set, &clamp, 1.0, EvolutionMode::Hebbian).unwrap();
        assert_eq!(h.mode(), EvolutionMode::Hebbian);
        let ur = r.unitary(2.0).unwrap();
        let uh = h.unitary(2.0).unwrap();
        assert!(ur.sub(&uh).op_norm().unwrap() < 1e-4);
        let unit = uh.adjoint().matmul(&uh);
        assert!(unit.max_abs_diff(&CMatrix::identity(8)) < 1e-10);
    }

    #[test]
    fn step_counts_are_powers_of_two() {
        let set = ts(&[&[1, 1]]);
        let clamp = ClampSet::new(&[1], &[1.0, 0.0]).unwrap();
        let s = SplitEvolution::new(&set, &clamp, 1.0, EvolutionMode::Reference).unwrap().with_max_step(0.01).unwrap();
        assert_eq!(s.steps_for(1.0), 128);
        assert_eq!(s.steps_for(0.0), 1);
        assert!(s.clone().with_max_step(0.0).is_err());
    }
}
