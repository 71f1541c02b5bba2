//! Symmetric eigensolver: Householder reduction to tridiagonal form followed
//! by the implicit QL iteration with Wilkinson-style shifts.
//!
//! [`SpectralDecomposition`] keeps the transformation in factored form
//! (reflectors plus plane rotations) so a vector can be moved into and out of
//! the eigenbasis in O(n²) without ever forming the eigenvector matrix.

use alloc::vec;
use alloc::vec::Vec;

use super::Matrix;
use crate::{Error, Result};

const MAX_QL_ITERATIONS: usize = 64;

#[derive(Debug, Clone)]
struct Reflector {
    start: usize,
    v: Vec<f64>,
}

impl Reflector {
    /// x ← (I − 2vvᵀ) x on the trailing block.
    fn apply(&self, x: &mut [f64]) {
        let tail = &mut x[self.start..];
        let k: f64 = 2.0 * self.v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum::<f64>();
        for (t, v) in tail.iter_mut().zip(&self.v) {
            *t -= k * v;
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Rotation {
    i: usize,
    c: f64,
    s: f64,
}

/// Eigenvalues of a real symmetric matrix together with a factored
/// eigenbasis. Eigenvalues are in no particular order; index `j` of
/// [`values`](Self::values) corresponds to coordinate `j` of
/// [`to_eigenbasis`](Self::to_eigenbasis).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    n: usize,
    values: Vec<f64>,
    reflectors: Vec<Reflector>,
    rotations: Vec<Rotation>,
}

impl SpectralDecomposition {
    /// Only the lower triangle of `a` is trusted to be meaningful; the matrix
    /// is assumed symmetric.
    pub fn new(a: &Matrix) -> Result<Self> {
        assert!(a.is_square(), "eigendecomposition needs a square matrix");
        let n = a.rows();
        let (mut d, mut e, reflectors) = tridiagonalize(a);
        let mut rotations = Vec::new();
        ql_implicit(&mut d, &mut e, &mut rotations)?;
        Ok(Self { n, values: d, reflectors, rotations })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coordinates `Vᵀ w` of `w` in the eigenbasis.
    pub fn to_eigenbasis(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.n);
        let mut z = w.to_vec();
        for r in &self.reflectors {
            r.apply(&mut z);
        }
        for rot in &self.rotations {
            let (a, b) = (z[rot.i], z[rot.i + 1]);
            z[rot.i + 1] = rot.s * a + rot.c * b;
            z[rot.i] = rot.c * a - rot.s * b;
        }
        z
    }

    /// The vector `V y` whose eigenbasis coordinates are `y`.
    pub fn from_eigenbasis(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n);
        let mut x = y.to_vec();
        for rot in self.rotations.iter().rev() {
            let (a, b) = (x[rot.i], x[rot.i + 1]);
            x[rot.i] = rot.c * a + rot.s * b;
            x[rot.i + 1] = -rot.s * a + rot.c * b;
        }
        for r in self.reflectors.iter().rev() {
            r.apply(&mut x);
        }
        x
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Full eigendecomposition with eigenvalues ascending and eigenvectors as
/// the columns of [`vectors`](Self::vectors).
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    values: Vec<f64>,
    vectors: Matrix,
}

impl SymmetricEigen {
    pub fn new(a: &Matrix) -> Result<Self> {
        let sd = SpectralDecomposition::new(a)?;
        let n = sd.n;
        // Columns of the identity pushed through the factored basis.
        let mut cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut unit = vec![0.0; n];
                unit[j] = 1.0;
                sd.from_eigenbasis(&unit)
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| sd.values[i].total_cmp(&sd.values[j]));
        let values = order.iter().map(|&i| sd.values[i]).collect();
        let mut vectors = Matrix::zeros(n, n);
        for (new_j, &old_j) in order.iter().enumerate() {
            let col = core::mem::take(&mut cols[old_j]);
            for (i, v) in col.into_iter().enumerate() {
                vectors[(i, new_j)] = v;
            }
        }
        Ok(Self { values, vectors })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `V f(Λ) Vᵀ` for a scalar function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Matrix::from_fn(n, n, |i, j| (0..n).map(|k| self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)]).sum())
    }
}

/// Householder tridiagonalisation. Returns the diagonal, the subdiagonal
/// (padded with a trailing zero to length n) and the reflectors, first
/// applied first.
fn tridiagonalize(a: &Matrix) -> (Vec<f64>, Vec<f64>, Vec<Reflector>) {
    let n = a.rows();
    let mut t = a.clone();
    let mut reflectors = Vec::new();
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let m = n - start;
        let sigma = libm::sqrt((start..n).map(|i| t[(i, k)] * t[(i, k)]).sum::<f64>());
        if sigma == 0.0 {
            continue;
        }
        let x0 = t[(start, k)];
        let alpha = if x0 > 0.0 { -sigma } else { sigma };
        let mut v: Vec<f64> = (start..n).map(|i| t[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);

        // S ← H S H with H = I − 2vvᵀ, via S − 2(v qᵀ + q vᵀ), q = p − (vᵀp) v.
        let p = &mut p[..m];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &t.row(start + r)[start..];
            *pr = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let kk: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
        for (pr, vr) in p.iter_mut().zip(&v) {
            *pr -= kk * vr;
        }
        for r in 0..m {
            let (vr, qr) = (v[r], p[r]);
            for c in 0..m {
                t[(start + r, start + c)] -= 2.0 * (vr * p[c] + qr * v[c]);
            }
        }
        t[(start, k)] = alpha;
        t[(k, start)] = alpha;
        for i in start + 1..n {
            t[(i, k)] = 0.0;
            t[(k, i)] = 0.0;
        }
        reflectors.push(Reflector { start, v });
    }
    let d = (0..n).map(|i| t[(i, i)]).collect();
    let mut e: Vec<f64> = (0..n.saturating_sub(1)).map(|i| t[(i + 1, i)]).collect();
    e.push(0.0);
    (d, e, reflectors)
}

/// Implicit QL on a symmetric tridiagonal matrix (diagonal `d`,
/// subdiagonal `e[i] = T[i+1][i]`, `e[n-1] = 0`). Eigenvalues are left in
/// `d`; every plane rotation is recorded as a column operation on (i, i+1).
fn ql_implicit(d: &mut [f64], e: &mut [f64], rotations: &mut Vec<Rotation>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::EigenNoConvergence);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotations.push(Rotation { i, c, s });
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sym(n: usize, seed: u64) -> Matrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn two_by_two() {
        let m = Matrix::from_row_major(2, 2, vec![0.0, 0.5, 0.5, 0.0]);
        let e = SymmetricEigen::new(&m).unwrap();
        assert!((e.values()[0] + 0.5).abs() < 1e-15);
        assert!((e.values()[1] - 0.5).abs() < 1e-15);
        assert!((e.spectral_norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reconstructs_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (20, 5), (41, 6)] {
            let a = sym(n, seed);
            let e = SymmetricEigen::new(&a).unwrap();
            let back = e.map(|v| v);
            assert!(back.max_abs_diff(&a) < 1e-12, "n = {n}");
            let vtv = e.vectors().transpose().matmul(e.vectors());
            assert!(vtv.max_abs_diff(&Matrix::identity(n)) < 1e-12);
            assert!(e.values().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn factored_basis_round_trip() {
        let a = sym(15, 9);
        let sd = SpectralDecomposition::new(&a).unwrap();
        let w: Vec<f64> = (0..15).map(|i| i as f64 - 7.0).collect();
        let z = sd.to_eigenbasis(&w);
        let back = sd.from_eigenbasis(&z);
        for (x, y) in w.iter().zip(&back) {
            assert!((x - y).abs() < 1e-12);
        }
        // A w = V Λ Vᵀ w
        let lz: Vec<f64> = z.iter().zip(sd.values()).map(|(z, l)| z * l).collect();
        let aw = sd.from_eigenbasis(&lz);
        for (x, y) in a.matvec(&w).iter().zip(&aw) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_and_diagonal_matrices() {
        let z = SymmetricEigen::new(&Matrix::zeros(4, 4)).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        let d = SymmetricEigen::new(&Matrix::from_diagonal(&[2.0, 0.1, -3.0])).unwrap();
        assert_eq!(d.values(), &[-3.0, 0.1, 2.0]);
    }
}
