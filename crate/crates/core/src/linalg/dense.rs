use alloc::vec::Vec;

use super::Matrix;

/// LU factorisation with partial pivoting, in place. Returns the pivot
/// permutation and its sign, or `None` when a pivot is exactly zero.
fn lu_in_place(a: &mut Matrix) -> Option<(Vec<usize>, f64)> {
    let n = a.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[(k, k)].abs();
        for i in k + 1..n {
            let v = a[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = a[(k, k)];
        for i in k + 1..n {
            let f = a[(i, k)] / pivot;
            a[(i, k)] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
    }
    Some((perm, sign))
}

/// Determinant by partially pivoted LU. The empty matrix has determinant 1.
pub fn determinant(a: &Matrix) -> f64 {
    assert!(a.is_square());
    let mut lu = a.clone();
    match lu_in_place(&mut lu) {
        None => 0.0,
        Some((_, sign)) => (0..lu.rows()).fold(sign, |acc, i| acc * lu[(i, i)]),
    }
}

/// Solves `a x = b` by partially pivoted LU; `None` if `a` is singular.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    assert!(a.is_square());
    assert_eq!(a.rows(), b.len());
    let n = b.len();
    let mut lu = a.clone();
    let (perm, _) = lu_in_place(&mut lu)?;
    let mut y: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        let mut s = y[i];
        for j in 0..i {
            s -= lu[(i, j)] * y[j];
        }
        y[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s -= lu[(i, j)] * y[j];
        }
        y[i] = s / lu[(i, i)];
    }
    Some(y)
}

/// Solves `a x = b` for symmetric positive definite `a`; `None` when the
/// Cholesky factorisation breaks down.
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    assert!(a.is_square());
    assert_eq!(a.rows(), b.len());
    let n = b.len();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag.is_nan() || diag <= 0.0 {
            return None;
        }
        let ljj = libm::sqrt(diag);
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(&Matrix::zeros(0, 0)), 1.0);
        let m = Matrix::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(determinant(&m), -1.0);
        let m = Matrix::from_row_major(3, 3, vec![0.0, -1.0, 0.0, -1.0, 1.0, -0.5, 0.0, -0.5, 1.0]);
        assert!((determinant(&m) + 1.0).abs() < 1e-15);
        let singular = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert_eq!(determinant(&singular), 0.0);
    }

    #[test]
    fn solvers_agree() {
        let a = Matrix::from_row_major(2, 2, vec![2.0, -0.5, -0.5, 2.0]);
        let x1 = cholesky_solve(&a, &[1.0, 1.0]).unwrap();
        let x2 = lu_solve(&a, &[1.0, 1.0]).unwrap();
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - 2.0 / 3.0).abs() < 1e-15);
            assert!((q - 2.0 / 3.0).abs() < 1e-15);
        }
        let indefinite = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 1.0]);
        assert!(cholesky_solve(&indefinite, &[1.0, 0.0]).is_none());
        assert!(lu_solve(&indefinite, &[1.0, 0.0]).is_some());
    }
}
