//! Cross-module checks through the public API, each against a direct
//! computation written out here.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use qudit_parity_core::gedik::{decide_parity, run_ideal, run_noisy, Parity};
use qudit_parity_core::qudit::{PermutationSpec, Sign};
use qudit_parity_core::tomography::{
    fidelity, mle_reconstruct, simulate_counts, MleOptions, TomographySettings,
};
use qudit_parity_core::two_photon::{
    cnot_bell_test, photonic_outcome_distribution, run_photonic_algorithm, NoiseParams,
};

/// `<k| F^dagger U_f F |1>` summed term by term.
fn direct_amplitude(spec: &PermutationSpec, k: usize) -> Complex64 {
    let d = spec.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 0..d {
        let phase = 2.0 * PI * (x as f64 - (spec.eval(x) * k) as f64) / d as f64;
        acc += Complex64::from_polar(1.0 / d as f64, phase);
    }
    acc
}

#[test]
fn ideal_runs_match_direct_sum() {
    for d in 3..=9 {
        for spec in PermutationSpec::all(d).unwrap() {
            let run = run_ideal(&spec).unwrap();
            for k in 0..d {
                let got = run.final_state.amp(k);
                assert!((got - direct_amplitude(&spec, k)).norm() < 1e-12, "{spec} k={k}");
            }
            let want = match spec.sign() {
                Sign::Positive => Parity::Positive,
                Sign::Negative => Parity::Negative,
            };
            assert_eq!(run.outcome.parity, want);
            assert_eq!(run.queries_used, 1);
        }
    }
}

#[test]
fn ideal_photonic_model_agrees_with_circuit() {
    for spec in PermutationSpec::all(4).unwrap() {
        let photonic = photonic_outcome_distribution(&spec, &NoiseParams::ideal()).unwrap();
        for k in 0..4 {
            let p = direct_amplitude(&spec, k).norm_sqr();
            assert!((photonic.probs()[k] - p).abs() < 1e-12, "{spec} k={k}");
        }
    }
}

#[test]
fn sampled_runs_are_seed_deterministic() {
    let spec = PermutationSpec::new(4, 2, Sign::Negative).unwrap();
    let noise = NoiseParams::calibrated();
    let a = run_photonic_algorithm(&spec, &noise, 2000, 11).unwrap();
    let b = run_photonic_algorithm(&spec, &noise, 2000, 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.counts.iter().sum::<u64>(), 2000);
    let run = run_noisy(&spec, &noise, 2000, 11).unwrap();
    assert_eq!(run.outcome.parity, Parity::Negative);
    assert_eq!(decide_parity(&a.distribution().unwrap()), run.outcome);
}

#[test]
fn noise_lowers_success_monotonically_in_overlap() {
    let spec = PermutationSpec::new(4, 1, Sign::Positive).unwrap();
    let mut last = 1.0 + 1e-12;
    for b2 in [1.0, 0.95, 0.9, 0.8, 0.6] {
        let noise = NoiseParams::new(f64::sqrt(b2), 1.0, 0.0).unwrap();
        let p = photonic_outcome_distribution(&spec, &noise).unwrap().probs()[1];
        assert!(p <= last + 1e-12, "beta^2={b2}: {p} > {last}");
        last = p;
    }
    assert!(last < 1.0);
}

#[test]
fn tomography_of_simulated_cnot_output() {
    let h = FRAC_1_SQRT_2;
    let bell = [0.0, h, h, 0.0].map(|x| Complex64::new(x, 0.0));
    let truth = cnot_bell_test(&NoiseParams::calibrated()).unwrap();
    let exact = fidelity(&truth, &bell).unwrap();
    let table = simulate_counts(&truth, &TomographySettings::full(), 20_000, 4).unwrap();
    let est = mle_reconstruct(&table, &MleOptions::default()).unwrap();
    let f = fidelity(&est.state, &bell).unwrap();
    assert!(est.converged);
    assert!((f - exact).abs() < 0.02, "reconstructed {f}, exact {exact}");
}
