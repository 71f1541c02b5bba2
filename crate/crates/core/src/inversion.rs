//! Recall by constrained energy minimisation.
//!
//! Clamping the known neurons and adding a ridge term turns recall into the
//! symmetric saddle-point system
//!
//! ```text
//! [ W − γI   P ] [ x ]   [ θ     ]
//! [ P        0 ] [ λ ] = [ x_inc ]
//! ```
//!
//! which is solved with an eigenvalue-filtered pseudoinverse.

use alloc::vec;
use alloc::vec::Vec;

use crate::classical::Thresholds;
use crate::hebbian::WeightMatrix;
use crate::linalg::{cholesky_solve, determinant, lu_solve, norm2, Matrix, SpectralDecomposition};
use crate::patterns::{ActivationPattern, ClampSet};
use crate::{Error, Result, Warning};

/// Eigenvalues with `|μ_j| ≤ RANK_TOLERANCE · ‖A‖` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// The assembled system `A v = w` for one recall problem.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: Matrix,
    w: Vec<f64>,
    gamma: f64,
    clamp: ClampSet,
    theta: Thresholds,
    weights: WeightMatrix,
    warnings: Vec<Warning>,
}

impl LinearSystem {
    /// Neuron count d; `A` is 2d × 2d.
    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.w
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn clamp(&self) -> &ClampSet {
        &self.clamp
    }

    pub fn theta(&self) -> &Thresholds {
        &self.theta
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Indices of the rows of `A` that are not identically zero: every x
    /// coordinate and the multipliers of clamped neurons.
    fn live_indices(&self) -> Vec<usize> {
        let d = self.dim();
        (0..d).chain(self.clamp.known_zero_based().into_iter().map(|i| d + i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    /// Block elimination; used only when no eigenvalue can fall under the
    /// filter threshold.
    Direct,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Relaxed (real-valued) recovered state.
    pub x: ActivationPattern,
    /// Lagrange multipliers; exactly zero off the clamp set. Empty for the
    /// perturbed-data solve.
    pub lambda: Vec<f64>,
    pub discretized: ActivationPattern,
    /// `|Ã⁻¹w − A⁻¹w|₂`, the part of the pseudoinverse solution lost to the
    /// eigenvalue filter.
    pub eta: f64,
    /// The filter threshold actually applied, `max(μ, 1e−10·‖A‖)`.
    pub mu_used: f64,
    pub minimum_certified: bool,
    pub path: SolvePath,
    pub warnings: Vec<Warning>,
}

fn check_gamma(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

/// Builds `A = [[W − γI, P], [P, 0]]` and `w = (θ; x_inc)`.
pub fn assemble(w: &WeightMatrix, clamp: &ClampSet, theta: &Thresholds, gamma: f64) -> Result<LinearSystem> {
    let d = w.dim();
    for found in [clamp.dim(), theta.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    check_gamma("gamma", gamma)?;
    if clamp.is_empty() {
        return Err(Error::EmptyClamp);
    }
    let mut a = Matrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = w.matrix()[(i, j)];
        }
        a[(i, i)] -= gamma;
    }
    for &k in clamp.indices() {
        a[(k - 1, d + k - 1)] = 1.0;
        a[(d + k - 1, k - 1)] = 1.0;
    }
    let mut rhs = theta.values().to_vec();
    rhs.extend_from_slice(clamp.values());

    let mut warnings = Vec::new();
    if gamma <= w.spectral_norm() {
        warnings.push(Warning::GammaBelowNorm { gamma, norm: w.spectral_norm() });
    }
    if gamma < 1.0 {
        warnings.push(Warning::GammaBelowOne { gamma });
    }
    warnings.extend(theta.warnings());
    Ok(LinearSystem { a, w: rhs, gamma, clamp: clamp.clone(), theta: theta.clone(), weights: w.clone(), warnings })
}

/// Result of applying a filtered pseudoinverse to one vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSolve {
    pub v: Vec<f64>,
    pub eta: f64,
    pub threshold: f64,
    /// Eigenvalues that were inverted.
    pub kept: usize,
    /// Non-zero eigenvalues (above the rank tolerance) dropped by the filter.
    pub filtered: usize,
}

/// `Ã⁻¹ w` for a symmetric `a`, inverting only eigenvalues with
/// `|μ_j| ≥ max(μ, 1e−10·‖a‖)`.
pub fn truncated_solve(a: &Matrix, w: &[f64], mu: f64) -> Result<TruncatedSolve> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter { name: "mu", value: mu });
    }
    if a.rows() != w.len() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: w.len() });
    }
    let spec = SpectralDecomposition::new(a)?;
    Ok(filtered_apply(&spec, w, mu))
}

fn filtered_apply(spec: &SpectralDecomposition, w: &[f64], mu: f64) -> TruncatedSolve {
    let tol = RANK_TOLERANCE * spec.spectral_norm();
    let threshold = mu.max(tol);
    let mut y = spec.to_eigenbasis(w);
    let (mut kept, mut filtered, mut lost) = (0, 0, 0.0);
    for (yj, &m) in y.iter_mut().zip(spec.values()) {
        let a = m.abs();
        if a >= threshold && a > tol {
            *yj /= m;
            kept += 1;
        } else {
            if a > tol {
                let c = *yj / m;
                lost += c * c;
                filtered += 1;
            }
            *yj = 0.0;
        }
    }
    TruncatedSolve { v: spec.from_eigenbasis(&y), eta: libm::sqrt(lost), threshold, kept, filtered }
}

/// Sign of each entry, with 0 mapped to +1.
pub fn discretize(x: &ActivationPattern) -> ActivationPattern {
    let v = x.values().iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
    ActivationPattern::binary(v).expect("signs are binary")
}

/// Solves with the filter threshold μ (0 for the plain pseudoinverse).
///
/// When γ > ‖W‖ and a lower bound on the smallest eigenvalue magnitude of
/// the live block of `A` clears the threshold, nothing would be filtered and
/// the system is solved by block elimination instead of an
/// eigendecomposition. The answer is the same.
pub fn solve(sys: &LinearSystem, mu: f64) -> Result<SolveReport> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter { name: "mu", value: mu });
    }
    let norm = sys.weights.spectral_norm();
    let gamma = sys.gamma;
    if gamma > norm {
        let a_ceiling = norm + gamma + 1.0;
        let threshold = mu.max(RANK_TOLERANCE * a_ceiling);
        if eigen_floor(norm, gamma) > threshold {
            if let Some(report) = solve_direct(sys, threshold) {
                return Ok(report);
            }
        }
    }
    solve_spectral(sys, mu)
}

/// Lower bound on `min |eig|` of the live block of `A` for γ > ‖W‖, from a
/// blockwise bound on the norm of its inverse.
fn eigen_floor(norm: f64, gamma: f64) -> f64 {
    let s = 1.0 / (gamma - norm);
    let g = norm;
    let corner = s * g * g + norm + gamma;
    let bound2 = s * s + 2.0 * (s * g) * (s * g) + 2.0 + corner * corner;
    1.0 / libm::sqrt(bound2)
}

fn solve_direct(sys: &LinearSystem, threshold: f64) -> Option<SolveReport> {
    let d = sys.dim();
    let wm = sys.weights.matrix();
    let known = sys.clamp.known_zero_based();
    let unknown = sys.clamp.unknown_zero_based();
    let xinc = sys.clamp.values();
    let th = sys.theta.values();

    let s = Matrix::from_fn(unknown.len(), unknown.len(), |a, b| {
        let (i, j) = (unknown[a], unknown[b]);
        let id = if i == j { sys.gamma } else { 0.0 };
        id - wm[(i, j)]
    });
    let rhs: Vec<f64> =
        unknown.iter().map(|&i| known.iter().map(|&j| wm[(i, j)] * xinc[j]).sum::<f64>() - th[i]).collect();
    let xu = cholesky_solve(&s, &rhs)?;
    let mut x = xinc.to_vec();
    for (&i, v) in unknown.iter().zip(xu) {
        x[i] = v;
    }
    let wx = wm.matvec(&x);
    let mut lambda = vec![0.0; d];
    for &i in &known {
        lambda[i] = th[i] - (wx[i] - sys.gamma * x[i]);
    }
    let x = ActivationPattern::new(x).ok()?;
    Some(SolveReport {
        discretized: discretize(&x),
        x,
        lambda,
        eta: 0.0,
        mu_used: threshold,
        minimum_certified: true,
        path: SolvePath::Direct,
        warnings: sys.warnings.clone(),
    })
}

/// Always goes through the eigendecomposition of the live block of `A`.
/// The multipliers of unclamped neurons sit on identically zero rows and
/// are exactly zero in the pseudoinverse solution.
pub fn solve_spectral(sys: &LinearSystem, mu: f64) -> Result<SolveReport> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter { name: "mu", value: mu });
    }
    let d = sys.dim();
    let live = sys.live_indices();
    let ar = sys.a.select(&live, &live);
    let wr: Vec<f64> = live.iter().map(|&i| sys.w[i]).collect();
    let spec = SpectralDecomposition::new(&ar)?;
    let t = filtered_apply(&spec, &wr, mu);
    let mut v = vec![0.0; 2 * d];
    for (&i, val) in live.iter().zip(t.v) {
        v[i] = val;
    }
    let lambda = v.split_off(d);
    let x = ActivationPattern::new(v)?;
    Ok(SolveReport {
        discretized: discretize(&x),
        x,
        lambda,
        eta: t.eta,
        mu_used: t.threshold,
        minimum_certified: certify_minimum_schur(&sys.weights, &sys.clamp, sys.gamma),
        path: SolvePath::Spectral,
        warnings: sys.warnings.clone(),
    })
}

/// Ridge-style recall from a perturbed pattern:
/// `((γ+β)I − W) x = β x_pert − θ`.
pub fn solve_perturbed(
    w: &WeightMatrix,
    x_pert: &ActivationPattern,
    theta: &Thresholds,
    gamma: f64,
    beta: f64,
) -> Result<SolveReport> {
    let d = w.dim();
    for found in [x_pert.dim(), theta.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    check_gamma("beta", beta)?;
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter { name: "gamma", value: gamma });
    }
    let shift = gamma + beta;
    let mut warnings = Vec::new();
    if shift <= w.spectral_norm() {
        warnings.push(Warning::ShiftBelowNorm { shift, norm: w.spectral_norm() });
    }
    warnings.extend(theta.warnings());
    let m = Matrix::identity(d).scale(shift).sub(w.matrix());
    let rhs: Vec<f64> = x_pert.values().iter().zip(theta.values()).map(|(p, t)| beta * p - t).collect();
    let (x, certified) = if shift > w.spectral_norm() {
        match cholesky_solve(&m, &rhs) {
            Some(x) => (x, true),
            None => (lu_solve(&m, &rhs).ok_or(Error::SingularSystem { shift })?, false),
        }
    } else {
        // The eigenvalues of M are shift − eig(W); reject a numerically zero one.
        let spec = SpectralDecomposition::new(w.matrix())?;
        let gap = spec.values().iter().map(|v| (shift - v).abs()).fold(f64::INFINITY, f64::min);
        if gap <= 1e-12 * (shift.abs() + w.spectral_norm()) {
            return Err(Error::SingularSystem { shift });
        }
        (lu_solve(&m, &rhs).ok_or(Error::SingularSystem { shift })?, false)
    };
    let x = ActivationPattern::new(x).map_err(|_| Error::SingularSystem { shift })?;
    Ok(SolveReport {
        discretized: discretize(&x),
        x,
        lambda: Vec::new(),
        eta: 0.0,
        mu_used: 0.0,
        minimum_certified: certified,
        path: SolvePath::Direct,
        warnings,
    })
}

/// Clamped-first ordering of the neurons (0-based), as used by
/// [`bordered_hessian`].
fn clamped_first(clamp: &ClampSet) -> Vec<usize> {
    let mut order = clamp.known_zero_based();
    order.extend(clamp.unknown_zero_based());
    order
}

/// `ℋ = [[0_l, −P̃], [−P̃ᵀ, γI − W]]` with the neurons reordered so the
/// clamped ones come first. P̃ is then `[I_l 0]`.
pub fn bordered_hessian(w: &WeightMatrix, clamp: &ClampSet, gamma: f64) -> Matrix {
    let d = w.dim();
    let l = clamp.len();
    let order = clamped_first(clamp);
    let mut h = Matrix::zeros(l + d, l + d);
    for k in 0..l {
        h[(k, l + k)] = -1.0;
        h[(l + k, k)] = -1.0;
    }
    for (a, &i) in order.iter().enumerate() {
        for (b, &j) in order.iter().enumerate() {
            let id = if i == j { gamma } else { 0.0 };
            h[(l + a, l + b)] = id - w.matrix()[(i, j)];
        }
    }
    h
}

/// Second-order test for a constrained minimum: `(−1)^l det ℋ_k > 0` for
/// every leading principal minor `k = 2l+1, …, l+d` of [`bordered_hessian`].
/// Evaluated literally, one determinant per minor.
pub fn certify_minimum(w: &WeightMatrix, clamp: &ClampSet, gamma: f64) -> bool {
    let d = w.dim();
    let l = clamp.len();
    if d != clamp.dim() || l == 0 {
        return false;
    }
    let h = bordered_hessian(w, clamp, gamma);
    let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    (2 * l + 1..=l + d).all(|k| sign * determinant(&h.leading(k)) > 0.0)
}

/// Same test through the Schur complement of the leading `2l × 2l` block,
/// which reduces every minor to `(−1)^l det` of a leading block of
/// `γI − W_UU`. All of them are positive exactly when that matrix is
/// positive definite, i.e. when a Cholesky factorisation exists.
pub fn certify_minimum_schur(w: &WeightMatrix, clamp: &ClampSet, gamma: f64) -> bool {
    if w.dim() != clamp.dim() || clamp.is_empty() {
        return false;
    }
    let unknown = clamp.unknown_zero_based();
    let s = Matrix::from_fn(unknown.len(), unknown.len(), |a, b| {
        let (i, j) = (unknown[a], unknown[b]);
        let id = if i == j { gamma } else { 0.0 };
        id - w.matrix()[(i, j)]
    });
    cholesky_solve(&s, &vec![0.0; unknown.len()]).is_some()
}

/// Euclidean norm of the stationarity residual `(γI − W)x + θ − Pλ`.
pub fn stationarity_residual(sys: &LinearSystem, report: &SolveReport) -> f64 {
    let x = report.x.values();
    let wx = sys.weights.matrix().matvec(x);
    let r: Vec<f64> = (0..sys.dim())
        .map(|i| {
            let p = if sys.clamp.contains(i + 1) { report.lambda[i] } else { 0.0 };
            sys.gamma * x[i] - wx[i] + sys.theta.values()[i] - p
        })
        .collect();
    norm2(&r)
}
