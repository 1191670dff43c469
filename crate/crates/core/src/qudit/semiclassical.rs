//! Measure-and-feed-forward inverse Fourier transform.
//!
//! For `d = 2^n` the inverse transform followed by a computational-basis
//! measurement is replaced by `n` single-qubit stages. Stage `l` (qubits
//! counted most significant first) rotates qubit `l` by
//! `diag(1, exp(-i phi_l))`, where `phi_l` is fixed by the bits already
//! recorded, applies a Hadamard and measures. Stage `l` yields bit `l` of the
//! outcome counted from the least significant end. Only single-qubit gates
//! and classical feed-forward are involved.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[allow(unused_imports)] // needed without std for the libm-backed methods
use num_traits::Float;
use rand::Rng;

use super::{qubit_count, MeasurementDistribution, QuditState};
use crate::error::{Error, Result};
use crate::linalg::{c64, cx, expi, CMatrix};
use crate::rng;

/// One sampled run of the protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiclassicalOutcome {
    /// Recovered level `j`.
    pub outcome: usize,
    /// Recorded bits in measurement order; entry `l` is bit `l` of `j`
    /// counted from the least significant end.
    pub bits: Vec<u8>,
}

fn correction_phase(recorded: &[u8]) -> f64 {
    let l = recorded.len() as i32;
    recorded
        .iter()
        .enumerate()
        .map(|(t, &b)| b as f64 * 2.0 * PI * 2f64.powi(t as i32 - l - 1))
        .sum()
}

fn stage_gate(recorded: &[u8]) -> [[c64; 2]; 2] {
    let ph = expi(-correction_phase(recorded));
    let h = FRAC_1_SQRT_2;
    // H * diag(1, e^{-i phi})
    [[cx(h, 0.0), ph * h], [cx(h, 0.0), ph * (-h)]]
}

fn apply_qubit_gate(amps: &mut [c64], n: usize, qubit: usize, g: &[[c64; 2]; 2]) {
    let mask = 1usize << (n - 1 - qubit);
    for i in 0..amps.len() {
        if i & mask == 0 {
            let a0 = amps[i];
            let a1 = amps[i | mask];
            amps[i] = g[0][0] * a0 + g[0][1] * a1;
            amps[i | mask] = g[1][0] * a0 + g[1][1] * a1;
        }
    }
}

fn full_gate(n: usize, qubit: usize, g: &[[c64; 2]; 2]) -> CMatrix {
    let d = 1usize << n;
    let mask = 1usize << (n - 1 - qubit);
    CMatrix::from_fn(d, d, |i, j| {
        if (i & !mask) != (j & !mask) {
            return cx(0.0, 0.0);
        }
        let bi = usize::from(i & mask != 0);
        let bj = usize::from(j & mask != 0);
        g[bi][bj]
    })
}

fn outcome_from_bits(bits: &[u8]) -> usize {
    bits.iter().enumerate().map(|(t, &b)| (b as usize) << t).sum()
}

/// Samples one outcome of the protocol with a generator seeded by `rng_seed`.
pub fn semiclassical_iqft_measure(s: &QuditState, rng_seed: u64) -> Result<SemiclassicalOutcome> {
    let mut rng = rng::from_seed(rng_seed);
    semiclassical_iqft_measure_with(s, &mut rng)
}

/// Samples one outcome of the protocol, drawing from `rng`.
pub fn semiclassical_iqft_measure_with<R: Rng + ?Sized>(
    s: &QuditState,
    rng: &mut R,
) -> Result<SemiclassicalOutcome> {
    let n = qubit_count(s.dim())?;
    let mut amps = s.amps().to_vec();
    let mut bits = Vec::with_capacity(n);
    for qubit in 0..n {
        apply_qubit_gate(&mut amps, n, qubit, &stage_gate(&bits));
        let mask = 1usize << (n - 1 - qubit);
        let p1: f64 =
            amps.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, z)| z.norm_sqr()).sum();
        let b = u8::from(rng.random::<f64>() < p1);
        let keep = if b == 1 { p1 } else { 1.0 - p1 };
        let k = 1.0 / keep.sqrt();
        for (i, z) in amps.iter_mut().enumerate() {
            if ((i & mask != 0) as u8) == b {
                *z *= k;
            } else {
                *z = cx(0.0, 0.0);
            }
        }
        bits.push(b);
    }
    Ok(SemiclassicalOutcome { outcome: outcome_from_bits(&bits), bits })
}

/// Exact outcome distribution of the protocol, obtained by following every
/// branch of the measurement tree.
pub fn semiclassical_distribution(s: &QuditState) -> Result<MeasurementDistribution> {
    let n = qubit_count(s.dim())?;
    let mut probs = vec![0.0; s.dim()];
    let mut bits = Vec::with_capacity(n);
    branch_pure(s.amps().to_vec(), n, &mut bits, &mut probs);
    MeasurementDistribution::new(probs)
}

fn branch_pure(amps: Vec<c64>, n: usize, bits: &mut Vec<u8>, probs: &mut [f64]) {
    let qubit = bits.len();
    if qubit == n {
        probs[outcome_from_bits(bits)] += amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
        return;
    }
    let mut rotated = amps;
    apply_qubit_gate(&mut rotated, n, qubit, &stage_gate(bits));
    let mask = 1usize << (n - 1 - qubit);
    for b in 0..2u8 {
        let projected: Vec<c64> = rotated
            .iter()
            .enumerate()
            .map(|(i, &z)| if ((i & mask != 0) as u8) == b { z } else { cx(0.0, 0.0) })
            .collect();
        bits.push(b);
        branch_pure(projected, n, bits, probs);
        bits.pop();
    }
}

fn check_density(rho: &CMatrix, readout_flip: f64) -> Result<usize> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: rho.rows(), found: rho.cols() });
    }
    if !(0.0..=1.0).contains(&readout_flip) {
        return Err(Error::InvalidParameter("readout flip probability outside [0, 1]"));
    }
    qubit_count(rho.rows())
}

fn project(rho: &CMatrix, n: usize, qubit: usize, b: u8) -> CMatrix {
    let mask = 1usize << (n - 1 - qubit);
    let keep = |i: usize| ((i & mask != 0) as u8) == b;
    CMatrix::from_fn(rho.rows(), rho.cols(), |i, j| {
        if keep(i) && keep(j) {
            rho[(i, j)]
        } else {
            cx(0.0, 0.0)
        }
    })
}

/// Exact outcome distribution of the protocol on a density matrix. Each
/// detected bit is misrecorded with probability `readout_flip`; the
/// recorded (possibly wrong) bit is the one fed forward.
pub fn semiclassical_distribution_density(
    rho: &CMatrix,
    readout_flip: f64,
) -> Result<MeasurementDistribution> {
    let n = check_density(rho, readout_flip)?;
    let mut probs = vec![0.0; rho.rows()];
    let mut bits = Vec::with_capacity(n);
    branch_density(rho.clone(), 1.0, n, readout_flip, &mut bits, &mut probs);
    let total: f64 = probs.iter().sum();
    MeasurementDistribution::new(probs.into_iter().map(|p| p / total).collect())
}

fn branch_density(
    rho: CMatrix,
    weight: f64,
    n: usize,
    flip: f64,
    bits: &mut Vec<u8>,
    probs: &mut [f64],
) {
    let qubit = bits.len();
    if qubit == n {
        probs[outcome_from_bits(bits)] += weight * rho.trace().re;
        return;
    }
    let rotated = full_gate(n, qubit, &stage_gate(bits)).conjugate(&rho);
    for b in 0..2u8 {
        let projected = project(&rotated, n, qubit, b);
        for recorded in 0..2u8 {
            let w = if recorded == b { 1.0 - flip } else { flip };
            if w == 0.0 {
                continue;
            }
            bits.push(recorded);
            branch_density(projected.clone(), weight * w, n, flip, bits, probs);
            bits.pop();
        }
    }
}

/// Samples one run of the protocol on a density matrix, with readout flips.
pub fn semiclassical_sample_density<R: Rng + ?Sized>(
    rho: &CMatrix,
    readout_flip: f64,
    rng: &mut R,
) -> Result<SemiclassicalOutcome> {
    let n = check_density(rho, readout_flip)?;
    let tr = rho.trace().re;
    let mut state = rho.scale(cx(1.0 / tr, 0.0));
    let mut bits = Vec::with_capacity(n);
    for qubit in 0..n {
        state = full_gate(n, qubit, &stage_gate(&bits)).conjugate(&state);
        let p0 = project(&state, n, qubit, 0).trace().re.clamp(0.0, 1.0);
        let b = u8::from(rng.random::<f64>() >= p0);
        let kept = project(&state, n, qubit, b);
        let p = kept.trace().re;
        state = kept.scale(cx(1.0 / p, 0.0));
        let recorded = if rng.random::<f64>() < readout_flip { 1 - b } else { b };
        bits.push(recorded);
    }
    Ok(SemiclassicalOutcome { outcome: outcome_from_bits(&bits), bits })
}
