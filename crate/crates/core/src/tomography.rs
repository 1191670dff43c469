//! Two-qubit polarization state tomography.
//!
//! A setting projects photon 1 onto one polarization and photon 2 onto
//! another. Its four outcomes are the combinations of each projector and its
//! orthogonal complement, in the order `(p1, p2)`, `(p1, p2')`, `(p1', p2)`,
//! `(p1', p2')`. The state is recovered by least-squares linear inversion or
//! by the diluted `R rho R` maximum-likelihood iteration.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

#[allow(unused_imports)] // needed without std for the libm-backed methods
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c64, cx, inner, kron_vec, CMatrix};
use crate::rng;

const PHYSICAL_TOL: f64 = 1e-9;

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Checks the three physicality conditions within `1e-9`.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch { expected: mat.rows(), found: mat.cols() });
        }
        if !mat.is_hermitian(PHYSICAL_TOL) {
            return Err(Error::NotPhysical("matrix is not Hermitian"));
        }
        if (mat.trace().re - 1.0).abs() > PHYSICAL_TOL {
            return Err(Error::NotPhysical("trace differs from one"));
        }
        let (eig, _) = mat.hermitian_eigen()?;
        if eig[0] < -PHYSICAL_TOL {
            return Err(Error::NotPhysical("negative eigenvalue"));
        }
        Ok(DensityMatrix { mat })
    }

    /// `|psi><psi|` for a normalized `psi`.
    pub fn from_pure(psi: &[c64]) -> Result<Self> {
        DensityMatrix::new(CMatrix::outer(psi))
    }

    /// Matrix entries.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Hilbert space dimension.
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// `tr rho^2`.
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.mat.hermitian_eigen().map(|(e, _)| e).unwrap_or_default()
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_pure(&self, psi: &[c64]) -> Result<f64> {
        let v = self.mat.mul_vec(psi)?;
        Ok(inner(psi, &v).re)
    }
}

fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (eig, vecs) = m.hermitian_eigen()?;
    let roots: Vec<c64> = eig.iter().map(|&e| cx(e.max(0.0).sqrt(), 0.0)).collect();
    Ok(&(&vecs * &CMatrix::diag(&roots)) * &vecs.adjoint())
}

/// Fidelity with a pure target, `<psi|rho|psi>`. This is the squared
/// convention: a pure state has fidelity 1 with itself and `I/4` has 1/4
/// with anything.
pub fn fidelity(rho: &DensityMatrix, target: &[c64]) -> Result<f64> {
    if target.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: target.len() });
    }
    rho.fidelity_pure(target)
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let s = psd_sqrt(&rho.mat)?;
    let inner = &(&s * &sigma.mat) * &s;
    let (eig, _) = inner.hermitian_eigen()?;
    let t: f64 = eig.iter().map(|e| e.max(0.0).sqrt()).sum();
    Ok((t * t).min(1.0))
}

/// Half the trace norm of `rho - sigma`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let (eig, _) = (&rho.mat - &sigma.mat).hermitian_eigen()?;
    Ok(0.5 * eig.iter().map(|e| e.abs()).sum::<f64>())
}

/// Single-photon polarization projector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Projector {
    /// Horizontal.
    H,
    /// Vertical.
    V,
    /// Diagonal, `(H + V)/sqrt 2`.
    D,
    /// Antidiagonal, `(H - V)/sqrt 2`.
    A,
    /// Right circular, `(H - iV)/sqrt 2`.
    R,
    /// Left circular, `(H + iV)/sqrt 2`.
    L,
}

impl Projector {
    /// All six, in the order H, V, D, A, R, L.
    pub const ALL: [Projector; 6] =
        [Projector::H, Projector::V, Projector::D, Projector::A, Projector::R, Projector::L];

    /// Jones vector.
    pub fn vector(self) -> [c64; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            Projector::H => [cx(1.0, 0.0), cx(0.0, 0.0)],
            Projector::V => [cx(0.0, 0.0), cx(1.0, 0.0)],
            Projector::D => [cx(h, 0.0), cx(h, 0.0)],
            Projector::A => [cx(h, 0.0), cx(-h, 0.0)],
            Projector::R => [cx(h, 0.0), cx(0.0, -h)],
            Projector::L => [cx(h, 0.0), cx(0.0, h)],
        }
    }

    /// Orthogonal partner.
    pub fn orthogonal(self) -> Projector {
        match self {
            Projector::H => Projector::V,
            Projector::V => Projector::H,
            Projector::D => Projector::A,
            Projector::A => Projector::D,
            Projector::R => Projector::L,
            Projector::L => Projector::R,
        }
    }

    /// One-letter name.
    pub fn label(self) -> char {
        match self {
            Projector::H => 'H',
            Projector::V => 'V',
            Projector::D => 'D',
            Projector::A => 'A',
            Projector::R => 'R',
            Projector::L => 'L',
        }
    }

    /// Inverse of [`Projector::label`].
    pub fn from_label(c: char) -> Option<Projector> {
        Projector::ALL.into_iter().find(|p| p.label() == c.to_ascii_uppercase())
    }
}

/// One measurement setting: a projector per photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TomographySetting {
    /// Projector on photon 1.
    pub first: Projector,
    /// Projector on photon 2.
    pub second: Projector,
}

impl TomographySetting {
    /// Two-photon vectors of the four outcomes.
    pub fn outcome_vectors(&self) -> [Vec<c64>; 4] {
        let (a, a_) = (self.first.vector(), self.first.orthogonal().vector());
        let (b, b_) = (self.second.vector(), self.second.orthogonal().vector());
        [kron_vec(&a, &b), kron_vec(&a, &b_), kron_vec(&a_, &b), kron_vec(&a_, &b_)]
    }

    /// Outcome probabilities for `rho`.
    pub fn probabilities(&self, rho: &CMatrix) -> [f64; 4] {
        let mut p = [0.0; 4];
        for (k, v) in self.outcome_vectors().iter().enumerate() {
            let rv = rho.mul_vec(v).expect("4x4 state");
            p[k] = inner(v, &rv).re;
        }
        p
    }
}

/// An ordered list of settings spanning the two-qubit operator space.
#[derive(Clone, Debug, PartialEq)]
pub struct TomographySettings {
    settings: Vec<TomographySetting>,
}

fn pauli(k: usize) -> CMatrix {
    let (o, l, i) = (cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 1.0));
    let entries = match k {
        0 => vec![l, o, o, l],
        1 => vec![o, l, l, o],
        2 => vec![o, -i, i, o],
        _ => vec![l, o, o, -l],
    };
    CMatrix::from_rows(2, 2, entries).expect("2x2")
}

fn pauli_basis() -> Vec<CMatrix> {
    (0..16).map(|k| pauli(k / 4).kron(&pauli(k % 4))).collect()
}

impl TomographySettings {
    /// Validates that the settings determine any two-qubit state.
    pub fn new(settings: Vec<TomographySetting>) -> Result<Self> {
        let s = TomographySettings { settings };
        let rank = s.rank()?;
        if rank < 16 {
            return Err(Error::RankDeficient { rank, required: 16 });
        }
        Ok(s)
    }

    /// All 36 combinations of the six projectors.
    pub fn full() -> Self {
        let settings = Projector::ALL
            .iter()
            .flat_map(|&a| {
                Projector::ALL.iter().map(move |&b| TomographySetting { first: a, second: b })
            })
            .collect();
        TomographySettings { settings }
    }

    /// The 16 combinations of H, V, D, R.
    pub fn minimal() -> Self {
        let base = [Projector::H, Projector::V, Projector::D, Projector::R];
        let settings = base
            .iter()
            .flat_map(|&a| base.iter().map(move |&b| TomographySetting { first: a, second: b }))
            .collect();
        TomographySettings { settings }
    }

    /// Settings in order.
    pub fn settings(&self) -> &[TomographySetting] {
        &self.settings
    }

    /// Number of settings.
    pub fn len(&self) -> usize {
        self.settings.len()
    }

    /// True when there are no settings.
    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    fn design(&self) -> Vec<[f64; 16]> {
        let basis = pauli_basis();
        let mut rows = Vec::with_capacity(4 * self.len());
        for s in &self.settings {
            for v in s.outcome_vectors().iter() {
                let mut row = [0.0; 16];
                for (k, p) in basis.iter().enumerate() {
                    let pv = p.mul_vec(v).expect("4x4");
                    row[k] = inner(v, &pv).re / 4.0;
                }
                rows.push(row);
            }
        }
        rows
    }

    /// Rank of the measurement map on Hermitian operators.
    pub fn rank(&self) -> Result<usize> {
        let (eig, _) = normal_matrix(&self.design()).hermitian_eigen()?;
        let top = eig.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
        Ok(eig.iter().filter(|&&e| e > 1e-10 * top.max(1e-300)).count())
    }
}

fn normal_matrix(design: &[[f64; 16]]) -> CMatrix {
    CMatrix::from_fn(16, 16, |i, j| cx(design.iter().map(|r| r[i] * r[j]).sum(), 0.0))
}

/// Counts per setting and outcome. Counts are real so that expected
/// (noise-free) counts can be fed in directly.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    /// Settings the counts belong to.
    pub settings: TomographySettings,
    /// One row of four outcome counts per setting.
    pub counts: Vec<[f64; 4]>,
}

impl CountTable {
    /// Checks the table shape and that counts are non-negative and finite.
    pub fn new(settings: TomographySettings, counts: Vec<[f64; 4]>) -> Result<Self> {
        if counts.len() != settings.len() {
            return Err(Error::DimensionMismatch { expected: settings.len(), found: counts.len() });
        }
        if counts.iter().flatten().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidParameter("counts must be finite and non-negative"));
        }
        if counts.iter().any(|row| row.iter().sum::<f64>() <= 0.0) {
            return Err(Error::EmptyCounts);
        }
        Ok(CountTable { settings, counts })
    }

    /// Total number of events.
    pub fn total(&self) -> f64 {
        self.counts.iter().flatten().sum()
    }
}

/// Expected counts for `rho`, `per_setting` events in every setting.
pub fn expected_counts(
    rho: &DensityMatrix,
    settings: &TomographySettings,
    per_setting: f64,
) -> Result<CountTable> {
    check_two_qubits(rho)?;
    let counts = settings
        .settings()
        .iter()
        .map(|s| s.probabilities(rho.matrix()).map(|p| p.max(0.0) * per_setting))
        .collect();
    CountTable::new(settings.clone(), counts)
}

/// Multinomial counts for `rho`; setting `k` draws from stream `k` of `seed`.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &TomographySettings,
    shots_per_setting: u64,
    seed: u64,
) -> Result<CountTable> {
    check_two_qubits(rho)?;
    if shots_per_setting == 0 {
        return Err(Error::InvalidParameter("shots must be positive"));
    }
    let counts = settings
        .settings()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut r = rng::task_stream(seed, k as u64);
            let c = rng::sample_counts(&mut r, &s.probabilities(rho.matrix()), shots_per_setting);
            [c[0] as f64, c[1] as f64, c[2] as f64, c[3] as f64]
        })
        .collect();
    CountTable::new(settings.clone(), counts)
}

fn check_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    Ok(())
}

/// Least-squares fit of the Pauli coefficients to the per-setting
/// frequencies. The result is Hermitian with unit trace but need not be
/// positive.
pub fn linear_inversion(table: &CountTable) -> Result<CMatrix> {
    let design = table.settings.design();
    let freqs: Vec<f64> = table
        .counts
        .iter()
        .flat_map(|row| {
            let n: f64 = row.iter().sum();
            row.map(|c| c / n)
        })
        .collect();
    let (eig, vecs) = normal_matrix(&design).hermitian_eigen()?;
    let top = eig.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    let rank = eig.iter().filter(|&&e| e > 1e-10 * top).count();
    if rank < 16 {
        return Err(Error::RankDeficient { rank, required: 16 });
    }
    let rhs: Vec<f64> =
        (0..16).map(|k| design.iter().zip(&freqs).map(|(r, f)| r[k] * f).sum()).collect();
    // pseudo-inverse through the eigenbasis; the normal matrix is real
    let mut coef = [0.0; 16];
    for (j, &e) in eig.iter().enumerate() {
        let proj: f64 = (0..16).map(|k| vecs[(k, j)].re * rhs[k]).sum();
        for (k, c) in coef.iter_mut().enumerate() {
            *c += vecs[(k, j)].re * proj / e;
        }
    }
    let basis = pauli_basis();
    let mut rho = CMatrix::zeros(4, 4);
    for (c, p) in coef.iter().zip(&basis) {
        rho = &rho + &p.scale(cx(*c / 4.0, 0.0));
    }
    let tr = rho.trace().re;
    if !(tr.abs() > 1e-300) {
        return Err(Error::NotPhysical("zero trace estimate"));
    }
    let rho = rho.scale(cx(1.0 / tr, 0.0));
    // symmetrize away round-off
    Ok((&rho + &rho.adjoint()).scale(cx(0.5, 0.0)))
}

/// Stopping rules of the maximum-likelihood iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleOptions {
    /// Stop when the log-likelihood gains less than this per step.
    pub tolerance: f64,
    /// Hard iteration cap.
    pub max_iterations: usize,
    /// Initial dilution step.
    pub initial_step: f64,
    /// Starting point of the iteration.
    pub start: MleStart,
}

/// Starting point of the maximum-likelihood iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MleStart {
    /// `I / 4`.
    MaximallyMixed,
    /// Linear-inversion estimate with negative eigenvalues clipped and a
    /// small admixture of `I / 4` where needed to keep every outcome
    /// possible.
    LinearInversion,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            tolerance: 1e-10,
            max_iterations: 10_000,
            initial_step: 1.0,
            start: MleStart::LinearInversion,
        }
    }
}

/// Estimate plus convergence record.
#[derive(Clone, Debug, PartialEq)]
pub struct MleResult {
    /// Reconstructed state.
    pub state: DensityMatrix,
    /// Accepted steps taken.
    pub iterations: usize,
    /// Whether the tolerance was met before the cap.
    pub converged: bool,
    /// Log-likelihood of the start state and after every accepted step.
    pub log_likelihood_history: Vec<f64>,
    /// Dilution step in force at the end.
    pub final_step: f64,
}

fn outcome_projectors(settings: &TomographySettings) -> Vec<CMatrix> {
    settings
        .settings()
        .iter()
        .flat_map(|s| s.outcome_vectors().into_iter().map(|v| CMatrix::outer(&v)))
        .collect()
}

fn log_likelihood(rho: &CMatrix, proj: &[CMatrix], counts: &[f64]) -> f64 {
    proj.iter()
        .zip(counts)
        .filter(|(_, &n)| n > 0.0)
        .map(|(p, &n)| n * (p * rho).trace().re.max(1e-300).ln())
        .sum()
}

const START_FLOOR: f64 = 1e-10;

fn physical_start(estimate: &CMatrix) -> Result<CMatrix> {
    let (eig, vecs) = estimate.hermitian_eigen()?;
    let clipped: Vec<f64> = eig.iter().map(|e| e.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Ok(CMatrix::identity(4).scale(cx(0.25, 0.0)));
    }
    let lowest = clipped.iter().fold(f64::INFINITY, |m, &e| m.min(e / total));
    let mix = if lowest < START_FLOOR { 4.0 * START_FLOOR } else { 0.0 };
    let diag: Vec<c64> =
        clipped.iter().map(|e| cx((1.0 - mix) * e / total + mix / 4.0, 0.0)).collect();
    let rho = &(&vecs * &CMatrix::diag(&diag)) * &vecs.adjoint();
    Ok((&rho + &rho.adjoint()).scale(cx(0.5, 0.0)))
}

/// Diluted `R rho R` maximum-likelihood reconstruction started from the
/// maximally mixed state. A step that lowers the likelihood is retried with
/// half the dilution parameter.
pub fn mle_reconstruct(table: &CountTable, opts: &MleOptions) -> Result<MleResult> {
    if !(opts.tolerance >= 0.0 && opts.initial_step > 0.0) {
        return Err(Error::InvalidParameter("MLE options out of range"));
    }
    let proj = outcome_projectors(&table.settings);
    let counts: Vec<f64> = table.counts.iter().flatten().copied().collect();
    let total = table.total();
    let mut rho = match opts.start {
        MleStart::MaximallyMixed => CMatrix::identity(4).scale(cx(0.25, 0.0)),
        MleStart::LinearInversion => physical_start(&linear_inversion(table)?)?,
    };
    let mut ll = log_likelihood(&rho, &proj, &counts);
    let mut history = vec![ll];
    let mut eps = opts.initial_step;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        let mut r = CMatrix::zeros(4, 4);
        for (p, &n) in proj.iter().zip(&counts) {
            if n > 0.0 {
                let prob = (p * &rho).trace().re.max(1e-300);
                r = &r + &p.scale(cx(n / (prob * total), 0.0));
            }
        }
        let mut accepted = None;
        while eps > 1e-12 {
            let step = &CMatrix::identity(4) + &r.scale(cx(eps, 0.0));
            let next = step.conjugate(&rho);
            let next = next.scale(cx(1.0 / next.trace().re, 0.0));
            let next_ll = log_likelihood(&next, &proj, &counts);
            if next_ll >= ll {
                accepted = Some((next, next_ll));
                break;
            }
            eps *= 0.5;
        }
        let Some((next, next_ll)) = accepted else {
            converged = true;
            break;
        };
        iterations += 1;
        let gain = next_ll - ll;
        rho = next;
        ll = next_ll;
        history.push(ll);
        if gain < opts.tolerance {
            converged = true;
            break;
        }
    }
    let rho = (&rho + &rho.adjoint()).scale(cx(0.5, 0.0));
    Ok(MleResult {
        state: DensityMatrix::new(rho)?,
        iterations,
        converged,
        log_likelihood_history: history,
        final_step: eps,
    })
}
