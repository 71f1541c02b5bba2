use hopfield_core::classical::{is_fixed_point, recall, Thresholds};
use hopfield_core::inversion::{assemble, certify_minimum, solve, solve_perturbed, solve_spectral, SolvePath};
use hopfield_core::patterns::{decode_rna, encode_rna, erase, hamming, perturb, random_keep};
use hopfield_core::quantum::{qhop_solve, HebbianSource, QhopConfig};
use hopfield_core::rng::{from_seed, stream_seed};
use hopfield_core::{hebbian, ActivationPattern, ClampSet, TrainingSet};
use rand::Rng;

fn random_set(seed: u64, d: usize, m: usize) -> TrainingSet {
    let mut r = from_seed(seed);
    let pats = (0..m)
        .map(|_| ActivationPattern::binary((0..d).map(|_| if r.gen() { 1.0 } else { -1.0 }).collect()).unwrap())
        .collect();
    TrainingSet::new(pats).unwrap()
}

#[test]
fn lightly_loaded_network_stores_its_patterns() {
    let d = 100;
    let m = 3;
    assert!((m as f64) < hebbian::capacity(d).unwrap());
    let set = random_set(7, d, m);
    let w = hebbian::train(&set).unwrap();
    let th = Thresholds::zeros(d);
    for p in set.patterns() {
        assert!(is_fixed_point(&w, p, &th).unwrap());
    }
}

#[test]
fn both_classical_engines_complete_a_half_erased_pattern() {
    let d = 100;
    let set = random_set(11, d, 4);
    let w = hebbian::train(&set).unwrap();
    let th = Thresholds::zeros(d);
    for (k, truth) in set.patterns().iter().enumerate() {
        let keep = random_keep(d, 70, stream_seed(3, &[k as u64])).unwrap();
        let (start, clamp) = erase(truth, &keep).unwrap();
        let it = recall(&w, &start, &th, 5, 100).unwrap();
        assert!(it.converged);
        assert_eq!(hamming(&it.state, truth).unwrap(), 0);
        let sys = assemble(&w, &clamp, &th, 1.0).unwrap();
        let r = solve(&sys, 0.0).unwrap();
        assert_eq!(r.path, SolvePath::Direct);
        assert!(r.minimum_certified);
        assert_eq!(r.discretized, *truth);
        assert!(certify_minimum(&w, &clamp, 1.0));
    }
}

#[test]
fn rna_round_trip_and_base_erasure() {
    let seq = "ACGUUGCAAC";
    let p = encode_rna(seq).unwrap();
    assert_eq!(p.dim(), 20);
    assert_eq!(decode_rna(&p).unwrap(), seq);
    let keep = hopfield_core::patterns::random_base_keep(20, 4, 1).unwrap();
    assert_eq!(keep.len(), 8);
    assert!(keep.chunks(2).all(|c| c[0] % 2 == 1 && c[1] == c[0] + 1));
}

#[test]
fn perturbed_pattern_is_pulled_back() {
    let d = 64;
    let set = random_set(21, d, 2);
    let w = hebbian::train(&set).unwrap();
    let truth = &set.patterns()[0];
    let noisy = perturb(truth, 6, 9).unwrap();
    assert_eq!(hamming(&noisy, truth).unwrap(), 6);
    // A shift just above ‖W‖ strongly amplifies the stored directions.
    let beta = w.spectral_norm() + 0.01;
    let x = solve_perturbed(&w, &noisy, &Thresholds::zeros(d), 0.0, beta).unwrap();
    assert!(x.minimum_certified);
    assert_eq!(hamming(&x.discretized, truth).unwrap(), 0);
    // With a large shift the solve barely moves the input.
    let far = solve_perturbed(&w, &noisy, &Thresholds::zeros(d), 1.0, 1.0).unwrap();
    assert_eq!(far.discretized, noisy);
}

#[test]
fn quantum_and_classical_inversion_agree() {
    let set = random_set(4, 4, 2);
    let truth = &set.patterns()[0];
    let clamp = ClampSet::new(&[1, 2, 4], truth.values()).unwrap();
    let th = Thresholds::zeros(4);
    let w = hebbian::train(&set).unwrap();
    let cfg = QhopConfig::default();
    let c = solve_spectral(&assemble(&w, &clamp, &th, cfg.gamma).unwrap(), cfg.mu).unwrap();
    let q = qhop_solve(HebbianSource::Patterns(&set), &clamp, &th, &cfg).unwrap();
    assert!(q.fidelity_with(c.x.values()) >= 0.98);
    assert_eq!(q.discretized, c.discretized);
}
