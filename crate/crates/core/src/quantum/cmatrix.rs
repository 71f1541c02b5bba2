//! Dense complex matrices, just enough for matrix-level circuit modelling.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::linalg::{Matrix, SpectralDecomposition, SymmetricEigen};
use crate::Result;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// `e^{iθ}`.
pub(crate) fn cis(theta: f64) -> C64 {
    C64::new(libm::cos(theta), libm::sin(theta))
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real(a: &Matrix) -> Self {
        Self { rows: a.rows(), cols: a.cols(), data: a.as_slice().iter().map(|&v| C64::new(v, 0.0)).collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `self ⊗ other`, with `self` on the more significant index.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r, c) = (other.rows, other.cols);
        CMatrix::from_fn(self.rows * r, self.cols * c, |i, j| self[(i / r, j / c)] * other[(i % r, j % c)])
    }

    /// Traces out the trailing factor of dimension `traced` from a square
    /// matrix on `keep ⊗ traced`.
    pub fn partial_trace_last(&self, traced: usize) -> CMatrix {
        assert!(self.rows == self.cols && self.rows.is_multiple_of(traced));
        let keep = self.rows / traced;
        CMatrix::from_fn(keep, keep, |i, j| (0..traced).map(|a| self[(i * traced + a, j * traced + a)]).sum())
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> CMatrix {
        assert_eq!(self.rows, self.cols);
        let mut result = CMatrix::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.matmul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    /// Largest singular value, from the real symmetric embedding of `M†M`.
    pub fn op_norm(&self) -> Result<f64> {
        let g = self.adjoint().matmul(self);
        let n = g.rows;
        let emb = Matrix::from_fn(2 * n, 2 * n, |i, j| {
            let v = g[(i % n, j % n)];
            match (i < n, j < n) {
                (true, true) | (false, false) => v.re,
                (true, false) => -v.im,
                (false, true) => v.im,
            }
        });
        let top = SpectralDecomposition::new(&emb)?.values().iter().fold(0.0f64, |m, &v| m.max(v));
        Ok(libm::sqrt(top))
    }

    /// `e^{iHt}` for real symmetric `H`.
    pub fn exp_i_symmetric(h: &Matrix, t: f64) -> Result<CMatrix> {
        Ok(Self::exp_i_from_eigen(&SymmetricEigen::new(h)?, t))
    }

    pub(crate) fn exp_i_from_eigen(eig: &SymmetricEigen, t: f64) -> CMatrix {
        let v = eig.vectors();
        let n = v.rows();
        let phases: Vec<C64> = eig.values().iter().map(|&m| cis(m * t)).collect();
        CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| phases[k] * (v[(i, k)] * v[(j, k)])).sum())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn cnorm2(v: &[C64]) -> f64 {
    libm::sqrt(v.iter().map(|a| a.norm_sqr()).sum())
}

/// `⟨a|b⟩`.
pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn op_norm_matches_known_values() {
        let m = CMatrix::from_real(&Matrix::from_row_major(2, 2, vec![3.0, 0.0, 4.0, 5.0]));
        // Singular values of [[3,0],[4,5]] are 3√5 and √5.
        assert_abs_diff_eq!(m.op_norm().unwrap(), 3.0 * libm::sqrt(5.0), epsilon = 1e-12);
        let u = CMatrix::identity(3).scale(cis(0.7));
        assert_abs_diff_eq!(u.op_norm().unwrap(), 1.0, epsilon = 1e-12);
        let skew = CMatrix::from_fn(2, 2, |i, j| if i == j { ZERO } else { C64::new(0.0, 2.0) });
        assert_abs_diff_eq!(skew.op_norm().unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn exponential_matches_nalgebra() {
        let h = Matrix::from_row_major(3, 3, vec![0.2, 0.5, -0.1, 0.5, -0.3, 0.4, -0.1, 0.4, 0.9]);
        let t = 1.3;
        let u = CMatrix::exp_i_symmetric(&h, t).unwrap();
        let ih = nalgebra::DMatrix::from_fn(3, 3, |i, j| nalgebra::Complex::new(0.0, h[(i, j)] * t));
        let want = ih.exp();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(u[(i, j)].re, want[(i, j)].re, epsilon = 1e-12);
                assert_abs_diff_eq!(u[(i, j)].im, want[(i, j)].im, epsilon = 1e-12);
            }
        }
        let unit = u.adjoint().matmul(&u);
        assert!(unit.max_abs_diff(&CMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn kron_partial_trace_and_pow() {
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let b = CMatrix::from_fn(3, 3, |i, j| if i == j { C64::new(1.0 / 3.0, 0.0) } else { ZERO });
        let k = a.kron(&b);
        assert_eq!(k[(3 + 2, 2)], a[(1, 0)] * b[(2, 2)]);
        assert!(k.partial_trace_last(3).max_abs_diff(&a) < 1e-15);
        let r = CMatrix::from_fn(2, 2, |i, j| C64::new((i * 2 + j) as f64 * 0.1, 0.0));
        let mut slow = CMatrix::identity(2);
        for _ in 0..13 {
            slow = slow.matmul(&r);
        }
        assert!(r.pow(13).max_abs_diff(&slow) < 1e-12);
        assert_eq!(r.pow(0), CMatrix::identity(2));
    }
}
