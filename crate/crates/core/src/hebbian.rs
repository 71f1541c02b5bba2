//! Hebbian training: the weight matrix and its density-matrix counterpart.

use crate::linalg::{Matrix, SpectralDecomposition};
use crate::patterns::TrainingSet;
use crate::{Error, Result};

/// Symmetric, zero-diagonal weights with spectral norm at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    m: Matrix,
    norm: f64,
}

impl WeightMatrix {
    /// Validates symmetry, a zero diagonal and ‖W‖ ≤ 1 (+1e-12).
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
        }
        if let Some((row, col)) = m.asymmetry() {
            return Err(Error::NotSymmetric { row: row + 1, col: col + 1 });
        }
        for i in 0..m.rows() {
            if m[(i, i)] != 0.0 {
                return Err(Error::NonZeroDiagonal { index: i + 1, value: m[(i, i)] });
            }
        }
        let norm = SpectralDecomposition::new(&m)?.spectral_norm();
        if norm > 1.0 + 1e-12 {
            return Err(Error::NormTooLarge { norm });
        }
        Ok(Self { m, norm })
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    /// Largest absolute eigenvalue, computed once at construction.
    pub fn spectral_norm(&self) -> f64 {
        self.norm
    }
}

/// Unit-trace positive semidefinite ρ = W + I/d.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: Matrix,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    /// The weight matrix this state corresponds to, ρ − I/d with the
    /// diagonal forced to exactly zero.
    pub fn weights(&self) -> Result<WeightMatrix> {
        let d = self.dim();
        let mut w = self.m.clone();
        for i in 0..d {
            w[(i, i)] = 0.0;
        }
        WeightMatrix::from_matrix(w)
    }
}

/// `W = (1/(Md)) Σ x xᵀ − I/d`.
pub fn train(ts: &TrainingSet) -> Result<WeightMatrix> {
    let d = ts.dim();
    let scale = 1.0 / (ts.len() as f64 * d as f64);
    let mut w = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..i {
            let s: f64 = ts.patterns().iter().map(|p| p.values()[i] * p.values()[j]).sum();
            w[(i, j)] = s * scale;
            w[(j, i)] = s * scale;
        }
    }
    // x_i² = 1 for every pattern, so the diagonal is 1/d − 1/d = 0 exactly.
    WeightMatrix::from_matrix(w)
}

/// `ρ = (1/M) Σ |x⟩⟨x|`, the uniform mixture of normalised pattern states.
pub fn density(ts: &TrainingSet) -> Result<DensityMatrix> {
    let d = ts.dim();
    let scale = 1.0 / (ts.len() as f64 * d as f64);
    let m =
        Matrix::from_fn(d, d, |i, j| ts.patterns().iter().map(|p| p.values()[i] * p.values()[j]).sum::<f64>() * scale);
    Ok(DensityMatrix { m })
}

pub fn spectral_norm(w: &WeightMatrix) -> f64 {
    w.spectral_norm()
}

/// Classical storage-capacity heuristic `d / (2 ln d)` (natural log).
pub fn capacity(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::CapacityDimension { d });
    }
    let d = d as f64;
    Ok(d / (2.0 * libm::log(d)))
}
