//! Four-level algorithm on two polarization qubits, end to end.
//!
//! Photon 1 carries the most significant bit of the level, photon 2 the
//! least significant, H = 0. The wave plates prepare the Fourier transform
//! of `|1>`, the submodule and flip plates apply the oracle, and the inverse
//! transform is done by measure-and-feed-forward on the two photons.

use alloc::vec::Vec;

use super::{CircuitSettings, GateChannel, NoiseParams};
use crate::error::{Error, Result};
use crate::linalg::{cx, kron_vec, CMatrix};
use crate::photonic::{prepare_eq3_settings, Polarization};
use crate::qudit::{
    qudit_index_to_bits, semiclassical_distribution_density, semiclassical_sample_density,
    MeasurementDistribution, PermutationSpec, Sign,
};
use crate::rng;
use crate::tomography::DensityMatrix;

use super::plate_settings;

/// Polarizations (photon 1, photon 2) reporting outcome `j`.
pub fn outcome_label(j: usize) -> Result<[Polarization; 2]> {
    let bits = qudit_index_to_bits(j, 2)?;
    Ok([Polarization::from_bit(bits[0]), Polarization::from_bit(bits[1])])
}

/// Outcome the ideal algorithm returns for `spec`.
pub fn correct_outcome(spec: &PermutationSpec) -> usize {
    match spec.sign() {
        Sign::Positive => 1,
        Sign::Negative => spec.dim() - 1,
    }
}

/// Post-selected two-photon density matrix just before readout, together
/// with the heralding probability of the submodule.
pub fn photonic_final_state(spec: &PermutationSpec, noise: &NoiseParams) -> Result<(CMatrix, f64)> {
    let settings = plate_settings(spec)?;
    final_state_for(&settings, noise)
}

fn final_state_for(settings: &CircuitSettings, noise: &NoiseParams) -> Result<(CMatrix, f64)> {
    let (p1, p2) = prepare_eq3_settings().photon_states()?;
    let rho = CMatrix::outer(&kron_vec(&p1, &p2));
    let channel: GateChannel = settings.core_channel()?;
    let (rho, weight) = channel.apply(&rho, noise)?;
    Ok((settings.flips()?.conjugate(&rho), weight))
}

/// Exact outcome distribution of the photonic run, readout errors included.
pub fn photonic_outcome_distribution(
    spec: &PermutationSpec,
    noise: &NoiseParams,
) -> Result<MeasurementDistribution> {
    let (rho, _) = photonic_final_state(spec, noise)?;
    semiclassical_distribution_density(&rho, noise.readout_flip)
}

/// Coincidence counts of a photonic run, indexed by outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct CoincidenceRecord {
    /// Counts per outcome `j`; the detector pair is [`outcome_label`]`(j)`.
    pub counts: [u64; 4],
    /// Number of heralded events.
    pub shots: u64,
    /// Seed of the run.
    pub seed: u64,
    /// Heralding probability of the submodule.
    pub herald_probability: f64,
}

impl CoincidenceRecord {
    /// Counts as a vector indexed by outcome.
    pub fn counts_by_outcome(&self) -> Vec<u64> {
        self.counts.to_vec()
    }

    /// Count for the detector pair (photon 1, photon 2).
    pub fn count(&self, p1: Polarization, p2: Polarization) -> u64 {
        self.counts[2 * p1.index() + p2.index()]
    }

    /// Empirical distribution.
    pub fn distribution(&self) -> Result<MeasurementDistribution> {
        MeasurementDistribution::from_counts(&self.counts)
    }
}

/// Samples `shots` heralded runs of the photonic algorithm for `spec`.
pub fn run_photonic_algorithm(
    spec: &PermutationSpec,
    noise: &NoiseParams,
    shots: u64,
    seed: u64,
) -> Result<CoincidenceRecord> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive"));
    }
    let (rho, herald_probability) = photonic_final_state(spec, noise)?;
    let mut rng = rng::from_seed(seed);
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        let out = semiclassical_sample_density(&rho, noise.readout_flip, &mut rng)?;
        counts[out.outcome] += 1;
    }
    Ok(CoincidenceRecord { counts, shots, seed, herald_probability })
}

/// Output of the CNOT for photon 1 vertical and photon 2 diagonal, the
/// control. Ideally the Bell state `(|HV> + |VH>)/sqrt 2`.
pub fn cnot_bell_test(noise: &NoiseParams) -> Result<DensityMatrix> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let target = [cx(0.0, 0.0), cx(1.0, 0.0)];
    let control = [cx(h, 0.0), cx(h, 0.0)];
    let rho = CMatrix::outer(&kron_vec(&target, &control));
    let (out, _) = GateChannel::cnot()?.apply(&rho, noise)?;
    DensityMatrix::new(out)
}
