//! Acceptance checks, one line per criterion. Exits non-zero on any failure.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qudit_parity_core::gedik::{
    classical_one_query_lower_bound, decide_parity, expected_final_amplitude, run_ideal, Parity,
};
use qudit_parity_core::linalg::{c64, cx, kron_vec, CMatrix};
use qudit_parity_core::photonic::{prepare_eq3_settings, JonesElement, ModeNetwork};
use qudit_parity_core::qudit::{
    apply, inverse_qft, measure_distribution, permutation_unitary, qft, semiclassical_distribution,
    semiclassical_iqft_measure_with, PermutationSpec, QuditState, Sign,
};
use qudit_parity_core::rng;
use qudit_parity_core::tomography::{
    expected_counts, fidelity, mle_reconstruct, simulate_counts, trace_distance, DensityMatrix,
    MleOptions, TomographySettings,
};
use qudit_parity_core::two_photon::{
    all_plate_settings, cnot_bell_test, correct_outcome, evolve_two_photons, hom_dip_scan,
    logical_gate_for_settings, run_photonic_algorithm, NoiseParams, TwoPhotonState, HOM_VISIBILITY,
};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Report {
    failures: usize,
}

impl Report {
    fn line(
        &mut self,
        name: &str,
        ok: bool,
        elapsed: Duration,
        limit: Option<f64>,
        detail: String,
    ) {
        let in_time = limit.is_none_or(|l| elapsed.as_secs_f64() < l);
        let pass = ok && in_time;
        if !pass {
            self.failures += 1;
        }
        let budget = limit.map(|l| format!(" (budget {l} s)")).unwrap_or_default();
        println!(
            "{} {name}: {detail}; {:.3} s{budget}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
}

fn gaussian_state(r: &mut rng::SimRng, d: usize) -> QuditState {
    let amps: Vec<c64> =
        (0..d).map(|_| cx(r.sample(StandardNormal), r.sample(StandardNormal))).collect();
    QuditState::normalized(amps).unwrap()
}

fn ginibre_state(r: &mut rng::SimRng) -> DensityMatrix {
    let g = CMatrix::from_fn(4, 4, |_, _| cx(r.sample(StandardNormal), r.sample(StandardNormal)));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(cx(1.0 / tr, 0.0))).unwrap()
}

fn ideal_determinism(rep: &mut Report) {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut wrong = 0;
    let mut total = 0;
    for d in 3..=12 {
        for spec in PermutationSpec::all(d).unwrap() {
            total += 1;
            let run = run_ideal(&spec).unwrap();
            if !run.outcome.parity.matches(spec.sign()) {
                wrong += 1;
            }
            worst = worst.max((run.outcome.success_prob - 1.0).abs());
        }
    }
    rep.line(
        "ideal determinism",
        wrong == 0 && worst < 1e-9,
        t.elapsed(),
        Some(1.0),
        format!("{total} specs over d=3..12, {wrong} wrong, max |P-1| = {worst:.1e}"),
    );
}

fn final_state_phases(rep: &mut Report) {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for spec in PermutationSpec::all(4).unwrap() {
        let run = run_ideal(&spec).unwrap();
        let m = spec.m() as f64;
        // closed forms written out here, independent of the library helper
        let (level, amp) = match spec.sign() {
            Sign::Positive => (1, cx((-2.0 * PI * m / 4.0).cos(), (-2.0 * PI * m / 4.0).sin())),
            Sign::Negative => {
                (3, cx((-2.0 * PI * 3.0 * m / 4.0).cos(), (-2.0 * PI * 3.0 * m / 4.0).sin()))
            }
        };
        worst = worst.max((run.final_state.amp(level) - amp).norm());
        let (lvl, a) = expected_final_amplitude(&spec);
        worst = worst.max((run.final_state.amp(lvl) - a).norm());
        for k in (0..4).filter(|&k| k != level) {
            worst = worst.max(run.final_state.amp(k).norm());
        }
    }
    rep.line(
        "final-state phases",
        worst < 1e-9,
        t.elapsed(),
        Some(1.0),
        format!("8 specs at d=4, max amplitude error {worst:.1e}"),
    );
}

fn product_form(rep: &mut Report) {
    let t = Instant::now();
    let psi = apply(&qft(4).unwrap(), &QuditState::basis(4, 1).unwrap()).unwrap();
    let first = [cx(FRAC_1_SQRT_2, 0.0), cx(-FRAC_1_SQRT_2, 0.0)];
    let second = [cx(FRAC_1_SQRT_2, 0.0), cx(0.0, FRAC_1_SQRT_2)];
    let product = kron_vec(&first, &second);
    let err = psi.amps().iter().zip(&product).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let (p1, p2) = prepare_eq3_settings().photon_states().unwrap();
    let prepared = kron_vec(&p1, &p2);
    let err_optics =
        psi.amps().iter().zip(&prepared).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    rep.line(
        "QFT|1> product form",
        err < 1e-12 && err_optics < 1e-12,
        t.elapsed(),
        None,
        format!("max error vs (|0>-|1>)(|0>+i|1>)/2 {err:.1e}, vs wave-plate preparation {err_optics:.1e}"),
    );
}

fn speedup_certificate(rep: &mut Report) {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 3..=6 {
        let r = classical_one_query_lower_bound(d).unwrap();
        ok &= r.strategies_enumerated == d << d;
        ok &= (r.best_one_query_worst_case - 0.5).abs() < 1e-12;
        ok &= (r.best_one_query_average - 0.5).abs() < 1e-12;
        ok &= r.two_query_success == 1.0 && r.two_query_queries == 2;
        ok &= r.quantum_queries == 1;
        parts.push(format!(
            "d={d}: {} strategies, one-query worst case {} (average {}, pure deterministic {}), two queries {}, quantum queries {}",
            r.strategies_enumerated,
            r.best_one_query_worst_case,
            r.best_one_query_average,
            r.best_one_query_deterministic_worst_case,
            r.two_query_success,
            r.quantum_queries
        ));
    }
    rep.line("speed-up certificate", ok, t.elapsed(), Some(10.0), parts.join("; "));
}

fn table_gates(rep: &mut Report) {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for (spec, settings) in all_plate_settings().unwrap() {
        let gate = logical_gate_for_settings(&settings).unwrap();
        // oracle: the permutation matrix built from f directly
        let oracle =
            CMatrix::from_fn(
                4,
                4,
                |i, j| if spec.eval(j) == i { cx(1.0, 0.0) } else { cx(0.0, 0.0) },
            );
        worst = worst.max(gate.matrix().max_abs_diff(&oracle));
        worst = worst.max(gate.matrix().max_abs_diff(permutation_unitary(&spec).matrix()));
    }
    rep.line(
        "waveplate settings gate equivalence",
        worst < 1e-9,
        t.elapsed(),
        None,
        format!("8 rows, max entry deviation {worst:.1e}"),
    );
}

fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * n as f64;
        if e > 1e-9 {
            stat += (c as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if bins < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
}

fn semiclassical_equivalence(rep: &mut Report) {
    let t = Instant::now();
    let mut r = rng::task_stream(2024, 0);
    let mut worst = 0.0f64;
    for d in [4, 8] {
        let iqft = inverse_qft(d).unwrap();
        for _ in 0..100 {
            let s = gaussian_state(&mut r, d);
            let full = measure_distribution(&apply(&iqft, &s).unwrap());
            worst = worst.max(semiclassical_distribution(&s).unwrap().max_deviation(&full));
        }
    }
    let mut pvals = Vec::new();
    for (task, d) in [(1u64, 4usize), (2, 8)] {
        let s = gaussian_state(&mut r, d);
        let probs = measure_distribution(&apply(&inverse_qft(d).unwrap(), &s).unwrap());
        let mut sr = rng::task_stream(2024, task);
        let mut counts = vec![0u64; d];
        for _ in 0..100_000 {
            counts[semiclassical_iqft_measure_with(&s, &mut sr).unwrap().outcome] += 1;
        }
        pvals.push(chi_square_p(&counts, probs.probs()));
    }
    rep.line(
        "semiclassical IQFT equivalence",
        worst < 1e-9 && pvals.iter().all(|&p| p > 1e-3),
        t.elapsed(),
        None,
        format!(
            "200 random states, max deviation {worst:.1e}; 1e5-shot chi-square p-values d=4 {:.3}, d=8 {:.3} (threshold 0.001)",
            pvals[0], pvals[1]
        ),
    );
}

fn hom(rep: &mut Report) {
    let t = Instant::now();
    let tau_c = 100.0;
    let delays: Vec<f64> = (-40..=40).map(|k| k as f64 * 25.0).collect();
    let scan = hom_dip_scan(&delays, tau_c, HOM_VISIBILITY.sqrt()).unwrap();
    let p0 = scan.iter().find(|(tau, _)| *tau == 0.0).unwrap().1;
    let far = scan[0].1;
    let v = (far - p0) / far;
    let perfect = hom_dip_scan(&[0.0], tau_c, 1.0).unwrap()[0].1;
    rep.line(
        "HOM dip",
        (v - 0.92459).abs() < 1e-6 && perfect.abs() < 1e-12,
        t.elapsed(),
        None,
        format!(
            "visibility {:.6}% (reported 92.459 +/- 0.372%), coincidence at zero delay with full overlap {perfect:.1e}",
            100.0 * v
        ),
    );
}

fn noisy_bands(rep: &mut Report) {
    let t = Instant::now();
    let noise = NoiseParams::calibrated();
    let mut mass = 0.0;
    let mut majority = 0;
    let mut per_spec = Vec::new();
    for (task, spec) in PermutationSpec::all(4).unwrap().into_iter().enumerate() {
        let rec = run_photonic_algorithm(&spec, &noise, 100_000, 7000 + task as u64).unwrap();
        let p = rec.counts[correct_outcome(&spec)] as f64 / rec.shots as f64;
        mass += p / 8.0;
        let verdict = decide_parity(&rec.distribution().unwrap());
        if verdict.parity.matches(spec.sign()) && verdict.parity != Parity::Inconclusive {
            majority += 1;
        }
        per_spec.push(format!("{}{}:{:.4}", spec.m(), spec.sign().symbol(), p));
    }
    let h = FRAC_1_SQRT_2;
    let bell = [cx(0.0, 0.0), cx(h, 0.0), cx(h, 0.0), cx(0.0, 0.0)];
    let f = fidelity(&cnot_bell_test(&noise).unwrap(), &bell).unwrap();
    rep.line(
        "noisy-run bands",
        (0.88..=0.99).contains(&mass) && (0.80..=0.97).contains(&f),
        t.elapsed(),
        Some(60.0),
        format!(
            "average success {:.6} in [0.88, 0.99] (reported 93.023 +/- 2.015%), majority rule correct on {majority}/8, per spec [{}]; Bell fidelity {f:.6} in [0.80, 0.97] (reported 89.180 +/- 2.987%)",
            mass,
            per_spec.join(" ")
        ),
    );
}

fn tomography(rep: &mut Report) {
    let t = Instant::now();
    let mut r = rng::task_stream(99, 0);
    let full = TomographySettings::full();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let rho = ginibre_state(&mut r);
        let table = expected_counts(&rho, &full, 1.0).unwrap();
        let est = mle_reconstruct(&table, &MleOptions::default()).unwrap();
        worst = worst.max(trace_distance(&est.state, &rho).unwrap());
    }
    let h = FRAC_1_SQRT_2;
    let bell = [cx(0.0, 0.0), cx(h, 0.0), cx(h, 0.0), cx(0.0, 0.0)];
    let bell_rho = DensityMatrix::from_pure(&bell).unwrap();
    let mut fids: Vec<f64> = (0..100)
        .map(|seed| {
            let table = simulate_counts(&bell_rho, &full, 10_000, seed).unwrap();
            let est = mle_reconstruct(&table, &MleOptions::default()).unwrap();
            fidelity(&est.state, &bell).unwrap()
        })
        .collect();
    fids.sort_by(f64::total_cmp);
    let median = 0.5 * (fids[49] + fids[50]);
    rep.line(
        "tomography identifiability",
        worst < 1e-6 && median > 0.99,
        t.elapsed(),
        Some(120.0),
        format!("50 random mixed states, max trace distance {worst:.1e}; Bell state at 1e4 shots/setting, median fidelity over 100 seeds {median:.6}"),
    );
}

fn random_network(r: &mut rng::SimRng, n_spatial: usize) -> ModeNetwork {
    let mut net = ModeNetwork::new(n_spatial);
    for _ in 0..r.random_range(1..12) {
        let mode = r.random_range(0..n_spatial);
        let angle = r.random_range(-180.0..180.0);
        let el = match r.random_range(0..5) {
            0 => JonesElement::hwp(mode, angle),
            1 => JonesElement::qwp(mode, angle),
            2 => JonesElement::phase(mode, angle),
            3 => JonesElement::pbs(mode.min(n_spatial - 2)),
            _ => JonesElement::bd(mode.min(n_spatial - 2)),
        };
        net = net.with(el);
    }
    net
}

fn conservation(rep: &mut Report) {
    let t = Instant::now();
    let mut r = rng::task_stream(31337, 0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n_spatial = r.random_range(2..5);
        let net = random_network(&mut r, n_spatial);
        let n = 2 * n_spatial;
        let u = gaussian_state(&mut r, n);
        let v = gaussian_state(&mut r, n);
        let beta = r.random_range(0.0..=1.0);
        let input = TwoPhotonState::product(u.amps(), v.amps(), cx(beta, 0.0)).unwrap();
        let out = evolve_two_photons(&net, &input).unwrap();
        worst = worst.max((out.total_probability() - 1.0).abs());
    }
    rep.line(
        "two-photon probability conservation",
        worst < 1e-9,
        t.elapsed(),
        None,
        format!("200 random networks and overlaps, max |sum - 1| = {worst:.1e}"),
    );
}

fn main() -> ExitCode {
    let mut rep = Report { failures: 0 };
    ideal_determinism(&mut rep);
    final_state_phases(&mut rep);
    product_form(&mut rep);
    speedup_certificate(&mut rep);
    table_gates(&mut rep);
    semiclassical_equivalence(&mut rep);
    hom(&mut rep);
    noisy_bands(&mut rep);
    tomography(&mut rep);
    conservation(&mut rep);
    if rep.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", rep.failures);
        ExitCode::FAILURE
    }
}
