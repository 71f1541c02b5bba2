//! The bundled synthetic RNA fixture.

use std::fmt::Write;

use hopfield_core::rng;
use rand::Rng;

pub const FIXTURE_SEED: u64 = 0;
pub const FIXTURE_SEQUENCES: usize = 8;
pub const FIXTURE_BASES: usize = 50;

/// The fixture as shipped in `data/synthetic_segments.fasta`.
pub const BUNDLED: &str = include_str!("../data/synthetic_segments.fasta");

/// `count` uniformly random RNA sequences of `bases` bases as FASTA text.
/// With two neurons per base, every neuron is an independent fair ±1.
pub fn synthetic_fasta(seed: u64, count: usize, bases: usize) -> String {
    const ALPHABET: [char; 4] = ['A', 'C', 'G', 'U'];
    let mut r = rng::from_seed(seed);
    let mut out = String::new();
    for k in 1..=count {
        let seq: String = (0..bases).map(|_| ALPHABET[r.gen_range(0..4)]).collect();
        writeln!(out, ">synthetic_segment_{k} seed={seed}").unwrap();
        writeln!(out, "{seq}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_file_matches_generator() {
        assert_eq!(BUNDLED, synthetic_fasta(FIXTURE_SEED, FIXTURE_SEQUENCES, FIXTURE_BASES));
    }

    #[test]
    fn fixture_has_eight_hundred_neuron_patterns() {
        let ts = crate::io::fasta_training_set(BUNDLED, crate::io::DEFAULT_BASES).unwrap();
        assert_eq!((ts.len(), ts.dim()), (8, 100));
    }
}
