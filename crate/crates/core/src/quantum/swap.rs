//! Swap-test readout of the overlap between two states.

use rand::distributions::{Bernoulli, Distribution};

use alloc::vec;

use super::cmatrix::{inner, ZERO};
use super::register::QuantumRegister;
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapTest {
    /// Exact probability of reading the ancilla as 1, `½(1 − |⟨a|b⟩|²)`.
    pub p_swap: f64,
    /// Exact `|⟨a|b⟩|²`, for checking.
    pub overlap: f64,
    /// Shot estimate `1 − 2p̂` of the overlap.
    pub estimate: f64,
    pub stderr: f64,
    pub ones: u64,
    pub shots: u64,
}

/// Simulates ancilla Hadamard, controlled swap of the two registers and a
/// second Hadamard, then samples the ancilla `shots` times.
pub fn swap_test(a: &QuantumRegister, b: &QuantumRegister, shots: u64, seed: u64) -> Result<SwapTest> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let (n, m) = (a.qubits(), b.qubits());
    if n != m {
        return Err(Error::DimensionMismatch { expected: n, found: m });
    }
    let dim = 1usize << n;
    let mut amps = vec![ZERO; 2 * dim * dim];
    for (i, &x) in a.amplitudes().iter().enumerate() {
        for (j, &y) in b.amplitudes().iter().enumerate() {
            amps[i * dim + j] = x * y;
        }
    }
    let mut reg = QuantumRegister::from_amplitudes(&[("ancilla", 1), ("a", n), ("b", n)], amps)?;
    reg.hadamard_all("ancilla")?;
    let half = dim * dim;
    let st = reg.amplitudes_mut();
    for i in 0..dim {
        for j in i + 1..dim {
            st.swap(half + i * dim + j, half + j * dim + i);
        }
    }
    reg.hadamard_all("ancilla")?;
    let p_swap = reg.marginal("ancilla")?[1];

    let mut r = rng::from_seed(seed);
    let coin = Bernoulli::new(p_swap.clamp(0.0, 1.0)).expect("probability in range");
    let ones = (0..shots).filter(|_| coin.sample(&mut r)).count() as u64;
    let p_hat = ones as f64 / shots as f64;
    let overlap = inner(a.amplitudes(), b.amplitudes()).norm_sqr();
    Ok(SwapTest {
        p_swap,
        overlap,
        estimate: 1.0 - 2.0 * p_hat,
        stderr: 2.0 * libm::sqrt(p_hat * (1.0 - p_hat) / shots as f64),
        ones,
        shots,
    })
}
