//! Activation patterns, the clamp set of known neurons, RNA encoding, and the
//! erasure/perturbation generators shared by every recall engine.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use crate::linalg::Matrix;
use crate::rng;
use crate::{Error, Result};

/// A vector of neuron values: binary (±1), incomplete (±1 or 0 for
/// unknown) or relaxed (any finite real).
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationPattern {
    values: Vec<f64>,
}

impl ActivationPattern {
    /// Any finite, non-empty vector.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidEntry { index: i + 1, value: values[i] });
        }
        Ok(Self { values })
    }

    /// Entries must be exactly +1 or −1.
    pub fn binary(values: Vec<f64>) -> Result<Self> {
        let p = Self::new(values)?;
        p.check(|v| v == 1.0 || v == -1.0)?;
        Ok(p)
    }

    /// Entries must be +1, −1 or 0 (unknown).
    pub fn incomplete(values: Vec<f64>) -> Result<Self> {
        let p = Self::new(values)?;
        p.check(|v| v == 1.0 || v == -1.0 || v == 0.0)?;
        Ok(p)
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        Self::binary(signs.iter().map(|&s| s as f64).collect())
    }

    fn check(&self, ok: impl Fn(f64) -> bool) -> Result<()> {
        match self.values.iter().position(|&v| !ok(v)) {
            Some(i) => Err(Error::InvalidEntry { index: i + 1, value: self.values[i] }),
            None => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 1.0 || v == -1.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub(crate) fn require_binary(&self) -> Result<()> {
        self.check(|v| v == 1.0 || v == -1.0)
    }
}

/// M ≥ 1 binary patterns of a common dimension, optionally named.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    patterns: Vec<ActivationPattern>,
    names: Vec<String>,
}

impl TrainingSet {
    pub fn new(patterns: Vec<ActivationPattern>) -> Result<Self> {
        let names = (1..=patterns.len()).map(|i| alloc::format!("pattern {i}")).collect();
        Self::with_names(patterns, names)
    }

    /// `names` must have one entry per pattern.
    pub fn with_names(patterns: Vec<ActivationPattern>, names: Vec<String>) -> Result<Self> {
        let first = patterns.first().ok_or(Error::EmptyTrainingSet)?;
        let d = first.dim();
        for p in &patterns {
            if p.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
            }
            p.require_binary()?;
        }
        if names.len() != patterns.len() {
            return Err(Error::DimensionMismatch { expected: patterns.len(), found: names.len() });
        }
        Ok(Self { patterns, names })
    }

    pub fn dim(&self) -> usize {
        self.patterns[0].dim()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn patterns(&self) -> &[ActivationPattern] {
        &self.patterns
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// 1-based lookup.
    pub fn pattern(&self, k: usize) -> Result<&ActivationPattern> {
        if k == 0 || k > self.len() {
            return Err(Error::PatternIndexOutOfRange { index: k, count: self.len() });
        }
        Ok(&self.patterns[k - 1])
    }
}

/// The known-neuron set 𝓛 together with the clamped values x^(inc).
#[derive(Debug, Clone, PartialEq)]
pub struct ClampSet {
    dim: usize,
    /// 1-based, strictly increasing.
    indices: Vec<usize>,
    /// Length `dim`, zero off the clamp set.
    values: Vec<f64>,
}

impl ClampSet {
    /// Clamps the given 1-based indices to the corresponding entries of
    /// `source` (length d). Indices are sorted and deduplicated; covering
    /// every neuron is rejected.
    pub fn new(indices: &[usize], source: &[f64]) -> Result<Self> {
        let dim = source.len();
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if let Some(&bad) = idx.iter().find(|&&i| i == 0 || i > dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        if idx.len() >= dim {
            return Err(Error::FullKeepSet);
        }
        let mut values = vec![0.0; dim];
        for &i in &idx {
            values[i - 1] = source[i - 1];
        }
        Ok(Self { dim, indices: idx, values })
    }

    /// Known neurons are the non-zero entries of an incomplete pattern.
    pub fn from_incomplete(pattern: &ActivationPattern) -> Result<Self> {
        let idx: Vec<usize> =
            pattern.values().iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(i, _)| i + 1).collect();
        Self::new(&idx, pattern.values())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// 1-based indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// x^(inc): clamped values, zero elsewhere.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn known_zero_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i - 1).collect()
    }

    pub(crate) fn unknown_zero_based(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| !self.contains(i + 1)).collect()
    }

    /// Diagonal 0/1 projector P onto the known neurons.
    pub fn projector(&self) -> Matrix {
        let mut p = Matrix::zeros(self.dim, self.dim);
        for &i in &self.indices {
            p[(i - 1, i - 1)] = 1.0;
        }
        p
    }
}

/// Maps A, C, G, U (any case) to (−1,−1), (−1,+1), (+1,−1), (+1,+1).
pub fn encode_rna(sequence: &str) -> Result<ActivationPattern> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut values = Vec::with_capacity(2 * sequence.len());
    for (pos, ch) in sequence.chars().enumerate() {
        let pair = match ch.to_ascii_uppercase() {
            'A' => [-1.0, -1.0],
            'C' => [-1.0, 1.0],
            'G' => [1.0, -1.0],
            'U' => [1.0, 1.0],
            _ => return Err(Error::InvalidBase { position: pos + 1, found: ch }),
        };
        values.extend_from_slice(&pair);
    }
    ActivationPattern::binary(values)
}

/// Inverse of [`encode_rna`] for binary patterns of even length.
pub fn decode_rna(pattern: &ActivationPattern) -> Result<String> {
    pattern.require_binary()?;
    if !pattern.dim().is_multiple_of(2) {
        return Err(Error::DimensionMismatch { expected: pattern.dim() + 1, found: pattern.dim() });
    }
    Ok(pattern
        .values()
        .chunks(2)
        .map(|p| match (p[0] > 0.0, p[1] > 0.0) {
            (false, false) => 'A',
            (false, true) => 'C',
            (true, false) => 'G',
            (true, true) => 'U',
        })
        .collect())
}

/// Keeps the 1-based `keep` positions of a binary pattern and zeroes the
/// rest.
pub fn erase(pattern: &ActivationPattern, keep: &[usize]) -> Result<(ActivationPattern, ClampSet)> {
    pattern.require_binary()?;
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let clamp = ClampSet::new(keep, pattern.values())?;
    let incomplete = ActivationPattern { values: clamp.values().to_vec() };
    Ok((incomplete, clamp))
}

/// `count` distinct 1-based neuron indices out of `d`, sorted.
pub fn random_keep(d: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count > d {
        return Err(Error::IndexOutOfRange { index: count, dim: d });
    }
    let mut r = rng::from_seed(seed);
    let mut keep: Vec<usize> = index::sample(&mut r, d, count).into_iter().map(|i| i + 1).collect();
    keep.sort_unstable();
    Ok(keep)
}

/// Picks `bases` whole RNA bases out of `d / 2` and returns both neuron
/// indices of each (1-based, sorted).
pub fn random_base_keep(d: usize, bases: usize, seed: u64) -> Result<Vec<usize>> {
    let total = d / 2;
    let chosen = random_keep(total, bases, seed)?;
    Ok(chosen.into_iter().flat_map(|b| [2 * b - 1, 2 * b]).collect())
}

/// Flips exactly `flip_count` uniformly chosen neurons.
pub fn perturb(pattern: &ActivationPattern, flip_count: usize, seed: u64) -> Result<ActivationPattern> {
    pattern.require_binary()?;
    let d = pattern.dim();
    if flip_count > d {
        return Err(Error::FlipCountOutOfRange { count: flip_count, dim: d });
    }
    let mut r = rng::from_seed(seed);
    let mut values = pattern.values.clone();
    for i in index::sample(&mut r, d, flip_count) {
        values[i] = -values[i];
    }
    Ok(ActivationPattern { values })
}

/// Number of positions where two binary patterns differ.
pub fn hamming(a: &ActivationPattern, b: &ActivationPattern) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    a.require_binary()?;
    b.require_binary()?;
    Ok(a.values.iter().zip(&b.values).filter(|(x, y)| x != y).count())
}
