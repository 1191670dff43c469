//! Parity determination with one oracle call, and the classical baseline.
//!
//! The quantum routine prepares `|1>`, applies the Fourier transform, the
//! hidden permutation once and the inverse transform. A positive permutation
//! leaves the register in `exp(-2 pi i m / d) |1>`, a negative one in
//! `exp(-2 pi i (d-1) m / d) |d-1>`, so one projective measurement decides
//! the parity with certainty.
//!
//! Classically any single evaluation `f(x) = y` is consistent with exactly
//! one positive and one negative permutation, which
//! [`classical_one_query_lower_bound`] certifies by exhaustive enumeration.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c64, expi};
use crate::qudit::{
    apply, inverse_qft, measure_distribution, permutation_unitary, qft, MeasurementDistribution,
    PermutationSpec, QuditState, Sign,
};
use crate::two_photon::{self, NoiseParams};

/// Minimum probability on a legal outcome for a parity verdict.
pub const PARITY_THRESHOLD: f64 = 0.5;

/// Verdict of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    /// Outcome `1`.
    Positive,
    /// Outcome `d - 1`.
    Negative,
    /// Neither legal outcome carries a majority.
    Inconclusive,
}

impl Parity {
    /// Lower-case name used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Positive => "positive",
            Parity::Negative => "negative",
            Parity::Inconclusive => "inconclusive",
        }
    }

    /// Whether the verdict names `sign`.
    pub fn matches(self, sign: Sign) -> bool {
        matches!(
            (self, sign),
            (Parity::Positive, Sign::Positive) | (Parity::Negative, Sign::Negative)
        )
    }
}

/// Parity verdict together with the outcome it rests on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParityOutcome {
    /// Verdict.
    pub parity: Parity,
    /// `1` for positive, `d - 1` for negative; for an inconclusive verdict
    /// the most probable outcome overall.
    pub outcome_index: usize,
    /// Probability of `outcome_index`.
    pub success_prob: f64,
}

/// Black box around a hidden permutation that counts every use.
#[derive(Debug)]
pub struct QueryOracle {
    spec: PermutationSpec,
    queries: usize,
}

impl QueryOracle {
    /// Wraps `spec`; the counter starts at zero.
    pub fn new(spec: PermutationSpec) -> Self {
        QueryOracle { spec, queries: 0 }
    }

    /// Dimension of the hidden permutation (public knowledge).
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// One classical evaluation `f(x)`.
    pub fn evaluate(&mut self, x: usize) -> usize {
        self.queries += 1;
        self.spec.eval(x)
    }

    /// One application of `U_f` to a state.
    pub fn apply(&mut self, state: &QuditState) -> Result<QuditState> {
        self.queries += 1;
        apply(&permutation_unitary(&self.spec), state)
    }

    /// Calls made so far.
    pub fn queries(&self) -> usize {
        self.queries
    }

    /// The hidden spec, for grading a verdict afterwards.
    pub fn reveal(&self) -> PermutationSpec {
        self.spec
    }
}

/// Result of the noiseless algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealRun {
    /// `U_FT^dagger U_f U_FT |1>`.
    pub final_state: QuditState,
    /// Verdict from the exact outcome distribution.
    pub outcome: ParityOutcome,
    /// Oracle calls used (always one).
    pub queries_used: usize,
}

/// Runs the algorithm against an oracle.
pub fn run_with_oracle(oracle: &mut QueryOracle) -> Result<IdealRun> {
    let d = oracle.dim();
    let start = QuditState::basis(d, 1)?;
    let fourier = apply(&qft(d)?, &start)?;
    let permuted = oracle.apply(&fourier)?;
    let final_state = apply(&inverse_qft(d)?, &permuted)?;
    let outcome = decide_parity(&measure_distribution(&final_state));
    Ok(IdealRun { final_state, outcome, queries_used: oracle.queries() })
}

/// Noiseless algorithm for `spec`.
pub fn run_ideal(spec: &PermutationSpec) -> Result<IdealRun> {
    run_with_oracle(&mut QueryOracle::new(*spec))
}

/// Closed-form final state: the occupied level and its amplitude.
pub fn expected_final_amplitude(spec: &PermutationSpec) -> (usize, c64) {
    let d = spec.dim();
    let m = spec.m() as f64;
    let df = d as f64;
    match spec.sign() {
        Sign::Positive => (1, expi(-2.0 * PI * m / df)),
        Sign::Negative => (d - 1, expi(-2.0 * PI * (df - 1.0) * m / df)),
    }
}

/// Majority rule on the two legal outcomes `1` and `d - 1`.
pub fn decide_parity(dist: &MeasurementDistribution) -> ParityOutcome {
    let probs = dist.probs();
    let d = probs.len();
    let (p_pos, p_neg) = (probs[1], probs[d - 1]);
    let (parity, index, p) = if p_pos >= p_neg {
        (Parity::Positive, 1, p_pos)
    } else {
        (Parity::Negative, d - 1, p_neg)
    };
    if p < PARITY_THRESHOLD {
        let (argmax, &pmax) = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("distribution has at least two outcomes");
        return ParityOutcome {
            parity: Parity::Inconclusive,
            outcome_index: argmax,
            success_prob: pmax,
        };
    }
    ParityOutcome { parity, outcome_index: index, success_prob: p }
}

/// Result of a shot-sampled run on the photonic model.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyRun {
    /// Empirical outcome distribution.
    pub dist: MeasurementDistribution,
    /// Majority-rule verdict.
    pub outcome: ParityOutcome,
}

/// Samples the four-level photonic realization and applies the majority rule.
pub fn run_noisy(
    spec: &PermutationSpec,
    noise: &NoiseParams,
    shots: u64,
    rng_seed: u64,
) -> Result<NoisyRun> {
    let record = two_photon::run_photonic_algorithm(spec, noise, shots, rng_seed)?;
    let dist = MeasurementDistribution::from_counts(&record.counts_by_outcome())?;
    let outcome = decide_parity(&dist);
    Ok(NoisyRun { dist, outcome })
}

/// `f(x) = y` is matched by exactly these two specs, one of each parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessPair {
    /// Queried input.
    pub x: usize,
    /// Observed answer.
    pub y: usize,
    /// `m` of the positive permutation with `f(x) = y`.
    pub positive_m: usize,
    /// `m` of the negative permutation with `f(x) = y`.
    pub negative_m: usize,
}

/// Exhaustive one-query analysis for one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    /// Dimension.
    pub d: usize,
    /// Deterministic one-query strategies examined: `d * 2^d`.
    pub strategies_enumerated: usize,
    /// Optimal worst-case success over randomized one-query strategies
    /// (mixtures of the enumerated deterministic ones).
    pub best_one_query_worst_case: f64,
    /// Best success under the uniform prior over the `2d` permutations.
    pub best_one_query_average: f64,
    /// Best worst-case success of a pure deterministic strategy.
    pub best_one_query_deterministic_worst_case: f64,
    /// Success of the two-query difference rule over all `2d` permutations.
    pub two_query_success: f64,
    /// Oracle calls made by the two-query rule on each permutation.
    pub two_query_queries: usize,
    /// Oracle calls made by the quantum routine on each permutation.
    pub quantum_queries: usize,
    /// One entry per `(x, y)`.
    pub witness_pairs: Vec<WitnessPair>,
    /// Caveats printed with the report.
    pub notes: Vec<String>,
}

/// Smallest dimension accepted by [`classical_one_query_lower_bound`].
pub const ENUMERATION_MIN_D: usize = 3;
/// Largest dimension accepted by [`classical_one_query_lower_bound`].
pub const ENUMERATION_MAX_D: usize = 8;

/// Enumerates every deterministic one-query strategy (input `x` plus a
/// decision table from the `d` possible answers to a parity) and grades it
/// on all `2d` permutations.
///
/// Under the uniform prior every strategy scores exactly 1/2, so by the
/// minimax theorem no randomized one-query strategy has worst-case success
/// above 1/2; the fair coin between "always positive" and "always negative"
/// attains it. Both bounds are computed, not assumed. The two-query
/// difference rule `f(1) - f(0) = +/-1 (mod d)` is checked to succeed on
/// every permutation.
pub fn classical_one_query_lower_bound(d: usize) -> Result<CertificateReport> {
    if !(ENUMERATION_MIN_D..=ENUMERATION_MAX_D).contains(&d) {
        return Err(Error::OutOfEnumerationRange {
            dim: d,
            min: ENUMERATION_MIN_D,
            max: ENUMERATION_MAX_D,
        });
    }
    let specs = PermutationSpec::all(d)?;
    let n_specs = specs.len() as f64;

    let mut strategies = 0usize;
    let mut best_avg = 0.0f64;
    let mut best_det_worst = 0.0f64;
    // correctness of the two constant strategies, per permutation
    let mut always_pos = Vec::with_capacity(specs.len());
    let mut always_neg = Vec::with_capacity(specs.len());

    for x in 0..d {
        for table in 0u32..(1 << d) {
            strategies += 1;
            let mut correct = 0usize;
            let mut worst = 1.0f64;
            for spec in &specs {
                let y = QueryOracle::new(*spec).evaluate(x);
                let guess = if table >> y & 1 == 1 { Sign::Negative } else { Sign::Positive };
                if guess == spec.sign() {
                    correct += 1;
                } else {
                    worst = 0.0;
                }
                if x == 0 && table == 0 {
                    always_pos.push(guess == spec.sign());
                }
                if x == 0 && table == (1 << d) - 1 {
                    always_neg.push(guess == spec.sign());
                }
            }
            best_avg = best_avg.max(correct as f64 / n_specs);
            best_det_worst = best_det_worst.max(worst);
        }
    }

    let mixture_worst = always_pos
        .iter()
        .zip(&always_neg)
        .map(|(&a, &b)| 0.5 * (a as u8 as f64) + 0.5 * (b as u8 as f64))
        .fold(1.0, f64::min);
    // Yao: randomized worst case <= best deterministic average under any prior.
    let best_worst = if (mixture_worst - best_avg).abs() < 1e-12 {
        mixture_worst
    } else {
        // bounds disagree; report the certified upper bound
        best_avg
    };

    let mut witness_pairs = Vec::with_capacity(d * d);
    for x in 0..d {
        for y in 0..d {
            let positive_m = (y + d - x) % d;
            let negative_m = (y + x) % d;
            debug_assert_eq!(PermutationSpec::new(d, positive_m, Sign::Positive)?.eval(x), y);
            debug_assert_eq!(PermutationSpec::new(d, negative_m, Sign::Negative)?.eval(x), y);
            witness_pairs.push(WitnessPair { x, y, positive_m, negative_m });
        }
    }

    let mut two_query_correct = 0usize;
    let mut two_query_queries = 0usize;
    let mut quantum_queries = 0usize;
    for spec in &specs {
        let mut oracle = QueryOracle::new(*spec);
        if two_query_rule(&mut oracle) == Some(spec.sign()) {
            two_query_correct += 1;
        }
        two_query_queries = two_query_queries.max(oracle.queries());
        quantum_queries = quantum_queries.max(run_ideal(spec)?.queries_used);
    }

    let notes = alloc::vec![
        String::from("classical success figures are derived by enumeration, not quoted"),
        String::from(
            "randomized strategies are mixtures of the enumerated deterministic ones; \
             their worst-case optimum equals the best uniform-prior average"
        ),
    ];

    Ok(CertificateReport {
        d,
        strategies_enumerated: strategies,
        best_one_query_worst_case: best_worst,
        best_one_query_average: best_avg,
        best_one_query_deterministic_worst_case: best_det_worst,
        two_query_success: two_query_correct as f64 / n_specs,
        two_query_queries,
        quantum_queries,
        witness_pairs,
        notes,
    })
}

/// Queries `0` and `1`; the difference `f(1) - f(0)` is `+1` or `-1 mod d`.
pub fn two_query_rule(oracle: &mut QueryOracle) -> Option<Sign> {
    let d = oracle.dim();
    let f0 = oracle.evaluate(0);
    let f1 = oracle.evaluate(1);
    match (f1 + d - f0) % d {
        1 => Some(Sign::Positive),
        k if k == d - 1 => Some(Sign::Negative),
        _ => None,
    }
}
