//! Conditional exponentiation of the Hebbian density matrix, one stored
//! pattern at a time.

use alloc::vec;
use alloc::vec::Vec;

use super::cmatrix::{cis, CMatrix, C64, ONE, ZERO};
use super::register::{qubits_for, QuantumRegister};
use crate::linalg::Matrix;
use crate::patterns::TrainingSet;
use crate::{Error, Result, Warning};

/// Time steps above this trigger [`Warning::LargeTimeStep`].
pub const MAX_QUIET_STEP: f64 = 0.1;

/// Step schedule for a product formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterPlan {
    t: f64,
    n: u64,
    delta_t: f64,
    target_eps: f64,
}

impl TrotterPlan {
    /// `n` rounds over `m` patterns, `Δt = t/(n m)`.
    pub fn qheb(t: f64, n: u64, m: usize) -> Result<Self> {
        Self::validate(t, n)?;
        if m == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        Ok(Self { t, n, delta_t: t / (n as f64 * m as f64), target_eps: predicted(t, n) })
    }

    /// Fewest rounds whose predicted error `t²/(2n)` is at most `eps`.
    pub fn qheb_for_accuracy(t: f64, m: usize, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter { name: "eps", value: eps });
        }
        let n = libm::ceil(t * t / (2.0 * eps)).max(1.0) as u64;
        let mut plan = Self::qheb(t, n, m)?;
        plan.target_eps = eps;
        Ok(plan)
    }

    /// `n` steps of the B + C + D split, `Δt = t/n`.
    pub fn split(t: f64, n: u64) -> Result<Self> {
        Self::validate(t, n)?;
        Ok(Self { t, n, delta_t: t / n as f64, target_eps: predicted(t, n) })
    }

    fn validate(t: f64, n: u64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter { name: "t", value: t });
        }
        if n == 0 {
            return Err(Error::InvalidParameter { name: "n", value: 0.0 });
        }
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn target_eps(&self) -> f64 {
        self.target_eps
    }

    pub fn predicted_error(&self) -> f64 {
        predicted(self.t, self.n)
    }

    pub fn warnings(&self) -> Vec<Warning> {
        step_warning(self.delta_t).into_iter().collect()
    }
}

fn predicted(t: f64, n: u64) -> f64 {
    t * t / (2.0 * n as f64)
}

fn step_warning(delta_t: f64) -> Option<Warning> {
    (delta_t.abs() > MAX_QUIET_STEP).then_some(Warning::LargeTimeStep { delta_t })
}

/// Normalised, zero-padded pattern state `|x⟩`.
pub(crate) fn pattern_state(x: &[f64], padded: usize) -> Vec<C64> {
    let norm = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    let mut s = vec![ZERO; padded];
    for (a, &v) in s.iter_mut().zip(x) {
        *a = C64::new(v / norm, 0.0);
    }
    s
}

/// `e^{−i|x⟩⟨x|Δt} = I + (e^{−iΔt} − 1)|x⟩⟨x|` for a unit vector.
pub fn projector_exp(x: &[C64], delta_t: f64) -> CMatrix {
    let f = cis(-delta_t) - ONE;
    let mut m = CMatrix::outer(x, x).scale(f);
    for i in 0..x.len() {
        m[(i, i)] += ONE;
    }
    m
}

fn check_pattern(ts: &TrainingSet, k: usize) -> Result<()> {
    if k == 0 || k > ts.len() {
        return Err(Error::PatternIndexOutOfRange { index: k, count: ts.len() });
    }
    Ok(())
}

fn states(ts: &TrainingSet) -> Vec<Vec<C64>> {
    let dp = 1usize << qubits_for(ts.dim());
    ts.patterns().iter().map(|p| pattern_state(p.values(), dp)).collect()
}

/// Applies `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ e^{−i|x_k⟩⟨x_k|Δt}` exactly. The register
/// needs a one-qubit `"control"` and a `"system"` sub-register sized for the
/// patterns; `k` is 1-based.
pub fn qheb_step(reg: &mut QuantumRegister, ts: &TrainingSet, k: usize, delta_t: f64) -> Result<Vec<Warning>> {
    check_pattern(ts, k)?;
    let dp = 1usize << qubits_for(ts.dim());
    let u = projector_exp(&pattern_state(ts.patterns()[k - 1].values(), dp), delta_t);
    check_system(reg, dp)?;
    reg.apply_conditioned(Some("control"), "system", |c| (c == 1).then_some(&u))?;
    Ok(step_warning(delta_t).into_iter().collect())
}

fn check_system(reg: &QuantumRegister, dp: usize) -> Result<()> {
    let (_, width) = reg.locate("system")?;
    if 1usize << width != dp {
        return Err(Error::DimensionMismatch { expected: dp, found: 1 << width });
    }
    let (_, c) = reg.locate("control")?;
    if c != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: c });
    }
    Ok(())
}

/// The same step realised with a fresh ancilla in `|x_k⟩`: apply
/// `e^{−i|1⟩⟨1| ⊗ S Δt}` (S swaps system and ancilla) and trace the ancilla
/// out. Acts on the density matrix `σ` of control ⊗ system and agrees with
/// [`qheb_step`] up to `O(Δt²)`.
pub fn qheb_step_swap(sigma: &CMatrix, ts: &TrainingSet, k: usize, delta_t: f64) -> Result<CMatrix> {
    check_pattern(ts, k)?;
    let dp = 1usize << qubits_for(ts.dim());
    if sigma.rows() != 2 * dp || sigma.cols() != 2 * dp {
        return Err(Error::DimensionMismatch { expected: 2 * dp, found: sigma.rows() });
    }
    let xk = pattern_state(ts.patterns()[k - 1].values(), dp);
    let anc = CMatrix::outer(&xk, &xk);
    let joint = sigma.kron(&anc);

    // Index (c, s, a) = (c·dp + s)·dp + a; e^{−iSΔt} = cos Δt − i sin Δt · S.
    let (cos, sin) = (libm::cos(delta_t), libm::sin(delta_t));
    let n = 2 * dp * dp;
    let mut u = CMatrix::zeros(n, n);
    for s in 0..dp {
        for a in 0..dp {
            let i0 = s * dp + a;
            u[(i0, i0)] = ONE;
            let i1 = dp * dp + s * dp + a;
            let swapped = dp * dp + a * dp + s;
            u[(i1, i1)] += C64::new(cos, 0.0);
            u[(i1, swapped)] += C64::new(0.0, -sin);
        }
    }
    let out = u.matmul(&joint).matmul(&u.adjoint());
    Ok(out.partial_trace_last(dp))
}

/// Density matrix of the listed sub-registers (in layout order), tracing out
/// the rest.
pub fn reduced_density(reg: &QuantumRegister, keep: &[&'static str]) -> Result<CMatrix> {
    let total = reg.qubits();
    let mut kept = vec![false; total];
    for name in keep {
        let (lo, width) = reg.locate(name)?;
        kept[lo..lo + width].iter_mut().for_each(|b| *b = true);
    }
    let kept_bits = kept.iter().filter(|&&b| b).count();
    let mut psi = CMatrix::zeros(1 << kept_bits, 1 << (total - kept_bits));
    for (idx, &a) in reg.amplitudes().iter().enumerate() {
        let (mut ki, mut ri) = (0usize, 0usize);
        for bit in (0..total).rev() {
            let v = (idx >> bit) & 1;
            if kept[bit] {
                ki = (ki << 1) | v;
            } else {
                ri = (ri << 1) | v;
            }
        }
        psi[(ki, ri)] = a;
    }
    Ok(psi.matmul(&psi.adjoint()))
}

/// One round `Π_k e^{−i|x_k⟩⟨x_k|Δt}` on the system, patterns applied in order.
pub(crate) fn round(states: &[Vec<C64>], delta_t: f64) -> CMatrix {
    let dp = states[0].len();
    states.iter().fold(CMatrix::identity(dp), |acc, s| projector_exp(s, delta_t).matmul(&acc))
}

/// The system-side block `(Π_k e^{−i|x_k⟩⟨x_k|Δt})^n` of the conditional
/// evolution, `Δt = t/(nM)`.
pub fn qheb_unitary(ts: &TrainingSet, plan: &TrotterPlan) -> CMatrix {
    round(&states(ts), plan.delta_t()).pow(plan.n())
}

/// Applies `n` rounds of all `M` controlled steps.
pub fn qheb_evolve(reg: &mut QuantumRegister, ts: &TrainingSet, plan: &TrotterPlan) -> Result<Vec<Warning>> {
    let dp = 1usize << qubits_for(ts.dim());
    check_system(reg, dp)?;
    let u = qheb_unitary(ts, plan);
    reg.apply_conditioned(Some("control"), "system", |c| (c == 1).then_some(&u))?;
    Ok(plan.warnings())
}

/// `e^{−iρt}` on the padded system, from an exact eigendecomposition.
pub fn exact_conditional(ts: &TrainingSet, t: f64) -> Result<CMatrix> {
    let rho = padded_density(ts);
    CMatrix::exp_i_symmetric(&rho, -t)
}

pub(crate) fn padded_density(ts: &TrainingSet) -> Matrix {
    let d = ts.dim();
    let dp = 1usize << qubits_for(d);
    let scale = 1.0 / (ts.len() as f64 * d as f64);
    Matrix::from_fn(dp, dp, |i, j| {
        if i < d && j < d {
            ts.patterns().iter().map(|p| p.values()[i] * p.values()[j]).sum::<f64>() * scale
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::ActivationPattern;
    use rand::Rng;

    fn ts(rows: &[&[i8]]) -> TrainingSet {
        TrainingSet::new(rows.iter().map(|r| ActivationPattern::from_signs(r).unwrap()).collect()).unwrap()
    }

    fn register(control: C64, system: &[C64]) -> QuantumRegister {
        let n = qubits_for(system.len());
        let mut amps = Vec::new();
        for c in [ONE - control, control] {
            amps.extend(system.iter().map(|s| c * s));
        }
        QuantumRegister::from_amplitudes(&[("control", 1), ("system", n)], amps).unwrap()
    }

    fn random_state(dim: usize, seed: u64) -> Vec<C64> {
        let mut rng = crate::rng::from_seed(seed);
        (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn control_zero_is_untouched() {
        let set = ts(&[&[1, -1, 1, 1]]);
        let sys = random_state(4, 1);
        let mut amps = sys.clone();
        amps.extend([ZERO; 4]);
        let reg = QuantumRegister::from_amplitudes(&[("control", 1), ("system", 2)], amps).unwrap();
        let mut a = reg.clone();
        qheb_step(&mut a, &set, 1, 0.3).unwrap();
        assert!(a.amplitudes().iter().zip(reg.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-15));
        let sigma = CMatrix::outer(reg.amplitudes(), reg.amplitudes());
        let b = qheb_step_swap(&sigma, &set, 1, 0.3).unwrap();
        assert!(b.max_abs_diff(&sigma) < 1e-15);
    }

    #[test]
    fn pattern_eigenstate_picks_up_a_phase() {
        let set = ts(&[&[1, 1]]);
        let x = pattern_state(&[1.0, 1.0], 2);
        let mut amps = vec![ZERO, ZERO];
        amps.extend(x.iter().copied());
        let mut reg = QuantumRegister::from_amplitudes(&[("control", 1), ("system", 1)], amps).unwrap();
        let before = reg.clone();
        let dt = 0.37;
        let w = qheb_step(&mut reg, &set, 1, dt).unwrap();
        assert_eq!(w, vec![Warning::LargeTimeStep { delta_t: dt }]);
        for (a, b) in reg.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b * cis(-dt)).norm() < 1e-15);
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-15);
        }
        assert!(qheb_step(&mut reg, &set, 1, 0.05).unwrap().is_empty());
        assert!(matches!(qheb_step(&mut reg, &set, 2, 0.01), Err(Error::PatternIndexOutOfRange { .. })));
    }

    #[test]
    fn swap_trick_gap_is_second_order() {
        let set = ts(&[&[1, -1, -1, 1], &[1, 1, -1, 1]]);
        let gap = |dt: f64, seed: u64| {
            let reg = register(C64::new(0.6, 0.2), &random_state(4, seed));
            let sigma = CMatrix::outer(reg.amplitudes(), reg.amplitudes());
            let mut exact = reg.clone();
            qheb_step(&mut exact, &set, 2, dt).unwrap();
            let want = CMatrix::outer(exact.amplitudes(), exact.amplitudes());
            qheb_step_swap(&sigma, &set, 2, dt).unwrap().sub(&want).op_norm().unwrap()
        };
        for seed in 0..5 {
            let g1 = gap(0.01, seed);
            let g2 = gap(0.005, seed);
            assert!(g1 <= 2.0 * 0.01 * 0.01, "gap {g1}");
            let ratio = g1 / g2;
            assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
        }
    }

    #[test]
    fn single_pattern_product_is_exact() {
        let set = ts(&[&[1, -1, 1]]);
        for n in [1, 3, 16] {
            let plan = TrotterPlan::qheb(1.7, n, 1).unwrap();
            let err = qheb_unitary(&set, &plan).sub(&exact_conditional(&set, 1.7).unwrap()).op_norm().unwrap();
            assert!(err <= 1e-10, "n={n}: {err}");
        }
        let zero = TrotterPlan::qheb(0.0, 4, 1).unwrap();
        assert!(qheb_unitary(&set, &zero).max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn trotter_error_halves_per_doubling() {
        let m2 = ts(&[&[1, 1, 1, 1], &[1, 1, 1, -1]]);
        let m3 = ts(&[&[1, 1, 1, 1], &[1, 1, 1, -1], &[1, -1, 1, 1]]);
        for set in [&m2, &m3] {
            for t in [0.5, 1.0, 2.0] {
                let exact = exact_conditional(set, t).unwrap();
                let errs: Vec<f64> = [8u64, 16, 32, 64]
                    .iter()
                    .map(|&n| {
                        let plan = TrotterPlan::qheb(t, n, set.len()).unwrap();
                        qheb_unitary(set, &plan).sub(&exact).op_norm().unwrap()
                    })
                    .collect();
                for p in errs.windows(2) {
                    assert!(p[0] / p[1] >= 1.8, "t={t}, errors {errs:?}");
                }
            }
        }
    }

    #[test]
    fn evolve_on_register_matches_block_unitary() {
        let set = ts(&[&[1, 1, -1, 1], &[-1, 1, 1, 1]]);
        let plan = TrotterPlan::qheb(1.0, 50, 2).unwrap();
        let sys = random_state(4, 9);
        let mut reg = register(C64::new(0.5, 0.0), &sys);
        let before = reg.clone();
        qheb_evolve(&mut reg, &set, &plan).unwrap();
        assert!((reg.norm() - 1.0).abs() < 1e-10);
        let u = qheb_unitary(&set, &plan);
        let tail = u.matvec(&before.amplitudes()[4..]);
        for (a, b) in reg.amplitudes()[4..].iter().zip(tail) {
            assert!((a - b).norm() < 1e-14);
        }
        assert_eq!(&reg.amplitudes()[..4], &before.amplitudes()[..4]);
    }

    #[test]
    fn plan_sizes() {
        let p = TrotterPlan::qheb_for_accuracy(2.0, 3, 0.01).unwrap();
        assert_eq!(p.n(), 200);
        assert!(p.predicted_error() <= 0.01);
        assert!((p.delta_t() - 2.0 / 600.0).abs() < 1e-15);
        assert!(TrotterPlan::qheb(1.0, 0, 1).is_err());
        assert_eq!(TrotterPlan::split(1.0, 4).unwrap().delta_t(), 0.25);
        assert_eq!(TrotterPlan::split(1.0, 4).unwrap().warnings().len(), 1);
    }

    #[test]
    fn reduced_density_traces_out_the_rest() {
        let a = random_state(2, 3);
        let b = random_state(4, 4);
        let c = random_state(2, 5);
        let mut amps = Vec::new();
        for x in &a {
            for y in &b {
                for z in &c {
                    amps.push(x * y * z);
                }
            }
        }
        let reg = QuantumRegister::from_amplitudes(&[("a", 1), ("b", 2), ("c", 1)], amps).unwrap();
        let norm = |v: &[C64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let unit = |v: &[C64]| -> Vec<C64> {
            let n = norm(v);
            v.iter().map(|x| x / n).collect()
        };
        let (a, b, c) = (unit(&a), unit(&b), unit(&c));
        let rho_b = reduced_density(&reg, &["b"]).unwrap();
        assert!(rho_b.max_abs_diff(&CMatrix::outer(&b, &b)) < 1e-14);
        let rho_ac = reduced_density(&reg, &["a", "c"]).unwrap();
        let ac: Vec<C64> = a.iter().flat_map(|x| c.iter().map(move |z| x * z)).collect();
        assert!(rho_ac.max_abs_diff(&CMatrix::outer(&ac, &ac)) < 1e-14);
        let all = reduced_density(&reg, &["a", "b", "c"]).unwrap();
        assert!((all.trace().re - 1.0).abs() < 1e-14);
    }
}
