//! States, unitaries and measurements of a single `d`-level system.
//!
//! Conventions used everywhere in the crate:
//!
//! * the Fourier transform has entry `(k, j) = exp(+2 pi i j k / d) / sqrt(d)`,
//!   so `qft(d) |1>` is the phase ramp `sum_k exp(2 pi i k / d) |k> / sqrt(d)`;
//! * when `d = 2^n` the level `j` is stored as `n` qubits with the first
//!   qubit the most significant bit (`|2> = |1> (x) |0>`).

mod semiclassical;

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // needed without std for the libm-backed methods
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c64, cx, expi, global_phase, norm_sqr, CMatrix};
use crate::TOLERANCE;

pub use semiclassical::{
    semiclassical_distribution, semiclassical_distribution_density, semiclassical_iqft_measure,
    semiclassical_iqft_measure_with, semiclassical_sample_density, SemiclassicalOutcome,
};

/// Pure state of one qudit.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditState {
    amps: Vec<c64>,
}

impl QuditState {
    /// Validates dimension and normalization.
    pub fn new(amps: Vec<c64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidDimension { dim: amps.len(), min: 2 });
        }
        let n = norm_sqr(&amps);
        if (n - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(QuditState { amps })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amps: Vec<c64>) -> Result<Self> {
        let n = norm_sqr(&amps);
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        let k = 1.0 / n.sqrt();
        QuditState::new(amps.into_iter().map(|z| z * k).collect())
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim, min: 2 });
        }
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, n_qubits: 0 });
        }
        let mut amps = alloc::vec![cx(0.0, 0.0); dim];
        amps[k] = cx(1.0, 0.0);
        Ok(QuditState { amps })
    }

    /// Number of levels.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitudes in the computational basis.
    pub fn amps(&self) -> &[c64] {
        &self.amps
    }

    /// Amplitude on `|k>`.
    pub fn amp(&self, k: usize) -> c64 {
        self.amps[k]
    }

    /// Multiplies by a unit-modulus scalar.
    pub fn with_phase(&self, c: c64) -> Self {
        QuditState { amps: self.amps.iter().map(|&z| z * c).collect() }
    }

    /// Equality up to a global phase.
    pub fn approx_eq(&self, other: &QuditState, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        match global_phase(&self.amps, &other.amps) {
            Some(ph) => self.amps.iter().zip(&other.amps).all(|(a, b)| (a - b * ph).norm() <= tol),
            None => false,
        }
    }

    /// Amplitude-exact equality, global phase included.
    pub fn approx_eq_exact(&self, other: &QuditState, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.amps.iter().zip(&other.amps).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `|psi><psi|`.
    pub fn density(&self) -> CMatrix {
        CMatrix::outer(&self.amps)
    }
}

/// A `d x d` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOp {
    mat: CMatrix,
}

impl UnitaryOp {
    /// Checks `U^dagger U = I` within [`TOLERANCE`].
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch { expected: mat.rows(), found: mat.cols() });
        }
        let deviation = mat.unitarity_deviation();
        if deviation > TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryOp { mat })
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Consumes the wrapper.
    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Inverse.
    pub fn adjoint(&self) -> Self {
        UnitaryOp { mat: self.mat.adjoint() }
    }

    /// `self` applied after `first`, i.e. the product `self * first`.
    pub fn after(&self, first: &UnitaryOp) -> Result<Self> {
        Ok(UnitaryOp { mat: self.mat.try_mul(&first.mat)? })
    }
}

/// Parity of a cyclic permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    /// `f(x) = (m + x) mod d`.
    Positive,
    /// `f(x) = (m - x) mod d`.
    Negative,
}

impl Sign {
    /// Both signs, positive first.
    pub const BOTH: [Sign; 2] = [Sign::Positive, Sign::Negative];

    /// `"+"` or `"-"`.
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Identifies `f_m^(+/-)(x) = (m +/- x) mod d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PermutationSpec {
    m: usize,
    sign: Sign,
    dim: usize,
}

impl PermutationSpec {
    /// Requires `d >= 3` and `m < d`; `d = 2` is rejected separately since
    /// both signs give the same function there.
    pub fn new(dim: usize, m: usize, sign: Sign) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim, min: 3 });
        }
        if dim == 2 {
            return Err(Error::ParityUndefined);
        }
        if m >= dim {
            return Err(Error::InvalidOffset { m, dim });
        }
        Ok(PermutationSpec { m, sign, dim })
    }

    /// All `2d` specs for dimension `d`, positive ones first.
    pub fn all(dim: usize) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(2 * dim);
        for sign in Sign::BOTH {
            for m in 0..dim {
                out.push(PermutationSpec::new(dim, m, sign)?);
            }
        }
        Ok(out)
    }

    /// Offset.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Parity.
    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Qudit dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Classical evaluation `f(x)`.
    pub fn eval(&self, x: usize) -> usize {
        let d = self.dim;
        let x = x % d;
        match self.sign {
            Sign::Positive => (self.m + x) % d,
            Sign::Negative => (self.m + d - x) % d,
        }
    }
}

impl fmt::Display for PermutationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f_{}^{} (d={})", self.m, self.sign, self.dim)
    }
}

/// Computational-basis outcome probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementDistribution {
    probs: Vec<f64>,
}

impl MeasurementDistribution {
    /// Validates the sum (within [`TOLERANCE`]) and clamps round-off
    /// negatives above `-1e-12` to zero.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDimension { dim: probs.len(), min: 2 });
        }
        if probs.iter().any(|&p| !(p >= -1e-12)) {
            return Err(Error::InvalidParameter("probability below zero"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: total });
        }
        Ok(MeasurementDistribution { probs: probs.into_iter().map(|p| p.max(0.0)).collect() })
    }

    /// Empirical distribution of integer counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyCounts);
        }
        MeasurementDistribution::new(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    /// Number of outcomes.
    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Outcome probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest absolute difference to another distribution.
    pub fn max_deviation(&self, other: &MeasurementDistribution) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension { dim: d, min: 2 })
    } else {
        Ok(())
    }
}

/// Quantum Fourier transform on `d` levels.
pub fn qft(d: usize) -> Result<UnitaryOp> {
    check_dim(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    let mat = CMatrix::from_fn(d, d, |k, j| {
        // reduce j*k mod d first to keep the phase argument small
        expi(2.0 * PI * ((j * k) % d) as f64 / d as f64) * norm
    });
    Ok(UnitaryOp { mat })
}

/// Conjugate transpose of [`qft`].
pub fn inverse_qft(d: usize) -> Result<UnitaryOp> {
    Ok(qft(d)?.adjoint())
}

/// `U_f = sum_j |f(j)><j|`.
pub fn permutation_unitary(spec: &PermutationSpec) -> UnitaryOp {
    let d = spec.dim();
    let mut mat = CMatrix::zeros(d, d);
    for j in 0..d {
        mat[(spec.eval(j), j)] = cx(1.0, 0.0);
    }
    UnitaryOp { mat }
}

/// `U |s>`.
pub fn apply(u: &UnitaryOp, s: &QuditState) -> Result<QuditState> {
    if u.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: s.dim() });
    }
    Ok(QuditState { amps: u.mat.mul_vec(&s.amps)? })
}

/// Born-rule probabilities of a projective measurement in the computational basis.
pub fn measure_distribution(s: &QuditState) -> MeasurementDistribution {
    MeasurementDistribution { probs: s.amps.iter().map(|z| z.norm_sqr()).collect() }
}

/// Outcome probabilities of a density matrix in the computational basis.
pub fn measure_distribution_density(rho: &CMatrix) -> Result<MeasurementDistribution> {
    MeasurementDistribution::new((0..rho.rows()).map(|k| rho[(k, k)].re).collect())
}

/// Bits of `j`, most significant first.
pub fn qudit_index_to_bits(j: usize, n_qubits: usize) -> Result<Vec<u8>> {
    if n_qubits >= usize::BITS as usize || j >= (1usize << n_qubits) {
        return Err(Error::IndexOutOfRange { index: j, n_qubits });
    }
    Ok((0..n_qubits).map(|l| ((j >> (n_qubits - 1 - l)) & 1) as u8).collect())
}

/// Inverse of [`qudit_index_to_bits`].
pub fn bits_to_qudit_index(bits: &[u8]) -> Result<usize> {
    if bits.len() >= usize::BITS as usize {
        return Err(Error::IndexOutOfRange { index: usize::MAX, n_qubits: bits.len() });
    }
    bits.iter().try_fold(0usize, |acc, &b| match b {
        0 | 1 => Ok((acc << 1) | b as usize),
        other => Err(Error::InvalidBit(other)),
    })
}

/// `log2(d)` when `d` is a power of two (and at least 2).
pub fn qubit_count(d: usize) -> Result<usize> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(d));
    }
    Ok(d.trailing_zeros() as usize)
}
