//! Two photons with partially overlapping wavepackets on a rail network.
//!
//! A two-photon state is an amplitude table `psi[a][b]` (photon 1 on rail
//! `a`, photon 2 on rail `b`) plus the overlap `beta = <phi_1|phi_2>` of the
//! internal wavepackets. Writing `phi_2 = beta phi_1 + gamma phi_perp`
//! splits the state into a bosonic part of weight `|beta|^2`, which
//! interferes, and a distinguishable part, which does not. For detector
//! rails `p != q`
//!
//! ```text
//! P(p, q) = |psi_pq|^2 + |psi_qp|^2 + 2 |beta|^2 Re(psi_pq conj(psi_qp))
//! P(p, p) = (1 + |beta|^2) |psi_pp|^2
//! ```
//!
//! Linear optics maps `psi -> U psi U^T` and leaves `beta` alone.

mod gate;
mod pipeline;

use alloc::vec::Vec;

#[allow(unused_imports)] // needed without std for the libm-backed methods
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c64, cx, kron_vec, CMatrix};
use crate::photonic::{compile_network, rail, ModeNetwork, Polarization};

pub use gate::{
    all_plate_settings, ideal_coupler_deg, logical_gate_for_settings, plate_settings,
    submodule_network, submodule_postselected_map, CircuitSettings, GateChannel, SubmoduleMap,
    CNOT_POSITION_DEG, HOM_POSITION_DEG, X_POSITION_DEG,
};
pub use pipeline::{
    cnot_bell_test, correct_outcome, outcome_label, photonic_final_state,
    photonic_outcome_distribution, run_photonic_algorithm, CoincidenceRecord,
};

/// Measured HOM visibility used for calibration.
pub const HOM_VISIBILITY: f64 = 0.92459;
/// Measured beam-displacer interferometer visibility used for calibration.
pub const MZ_VISIBILITY: f64 = 0.99691;

/// Imperfections of the photonic model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    /// Wavepacket overlap `|<phi_1|phi_2>|`.
    pub beta: f64,
    /// Factor multiplying coherences between the two interferometer arms.
    pub mz_dephasing: f64,
    /// Per-photon probability of recording the wrong polarization.
    pub readout_flip: f64,
}

impl NoiseParams {
    /// Validates that every field lies in `[0, 1]`.
    pub fn new(beta: f64, mz_dephasing: f64, readout_flip: f64) -> Result<Self> {
        for (v, what) in [
            (beta, "beta outside [0, 1]"),
            (mz_dephasing, "mz_dephasing outside [0, 1]"),
            (readout_flip, "readout_flip outside [0, 1]"),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(what));
            }
        }
        Ok(NoiseParams { beta, mz_dephasing, readout_flip })
    }

    /// Perfect photons, perfect interferometer, perfect detection.
    pub fn ideal() -> Self {
        NoiseParams { beta: 1.0, mz_dephasing: 1.0, readout_flip: 0.0 }
    }

    /// `beta^2` and the arm coherence set to the two measured visibilities,
    /// no readout error.
    pub fn calibrated() -> Self {
        NoiseParams { beta: HOM_VISIBILITY.sqrt(), mz_dephasing: MZ_VISIBILITY, readout_flip: 0.0 }
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams::ideal()
    }
}

/// Two photons on a rail network.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonState {
    amps: CMatrix,
    beta: c64,
}

fn exchange_overlap(amps: &CMatrix) -> f64 {
    let n = amps.rows();
    let mut s = cx(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            s += amps[(a, b)] * amps[(b, a)].conj();
        }
    }
    s.re
}

impl TwoPhotonState {
    /// Builds a state from an amplitude table, rescaled so that the detection
    /// probabilities over all outcome pairs sum to one.
    pub fn new(amps: CMatrix, beta: c64) -> Result<Self> {
        if !amps.is_square() {
            return Err(Error::DimensionMismatch { expected: amps.rows(), found: amps.cols() });
        }
        if beta.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter("|beta| must not exceed 1"));
        }
        let total = amps.frobenius_norm().powi(2) + beta.norm_sqr() * exchange_overlap(&amps);
        if !(total > 0.0) {
            return Err(Error::NotNormalized { norm_sqr: total });
        }
        Ok(TwoPhotonState { amps: amps.scale(cx(1.0 / total.sqrt(), 0.0)), beta })
    }

    /// Photon 1 in `u`, photon 2 in `v`.
    pub fn product(u: &[c64], v: &[c64], beta: c64) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
        }
        let n = u.len();
        TwoPhotonState::new(CMatrix::from_rows(n, n, kron_vec(u, v))?, beta)
    }

    /// Photon 1 on `(mode1, pol1)`, photon 2 on `(mode2, pol2)`.
    pub fn on_rails(
        n_spatial: usize,
        (mode1, pol1): (usize, Polarization),
        (mode2, pol2): (usize, Polarization),
        beta: c64,
    ) -> Result<Self> {
        let n = 2 * n_spatial;
        let mut amps = CMatrix::zeros(n, n);
        amps[(rail(mode1, pol1), rail(mode2, pol2))] = cx(1.0, 0.0);
        TwoPhotonState::new(amps, beta)
    }

    /// Number of rails.
    pub fn n_rails(&self) -> usize {
        self.amps.rows()
    }

    /// Amplitude table.
    pub fn amps(&self) -> &CMatrix {
        &self.amps
    }

    /// Wavepacket overlap.
    pub fn beta(&self) -> c64 {
        self.beta
    }

    /// Same amplitudes with a different overlap (renormalized).
    pub fn with_beta(&self, beta: c64) -> Result<Self> {
        TwoPhotonState::new(self.amps.clone(), beta)
    }

    /// Sum of [`detection_probability`] over all unordered rail pairs.
    pub fn total_probability(&self) -> f64 {
        let n = self.n_rails();
        (0..n)
            .flat_map(|p| (p..n).map(move |q| (p, q)))
            .map(|(p, q)| detection_probability(self, p, q))
            .sum()
    }
}

/// Propagates both photons through `net`.
pub fn evolve_two_photons(net: &ModeNetwork, input: &TwoPhotonState) -> Result<TwoPhotonState> {
    if net.n_rails() != input.n_rails() {
        return Err(Error::DimensionMismatch { expected: net.n_rails(), found: input.n_rails() });
    }
    let u = compile_network(net)?;
    let u = u.matrix();
    let amps = &(u * &input.amps) * &u.transpose();
    Ok(TwoPhotonState { amps, beta: input.beta })
}

/// Probability of one photon on rail `p` and one on rail `q` (order
/// irrelevant; `p == q` means both photons on the same rail).
pub fn detection_probability(state: &TwoPhotonState, p: usize, q: usize) -> f64 {
    let a = &state.amps;
    let b2 = state.beta.norm_sqr();
    if p == q {
        (1.0 + b2) * a[(p, p)].norm_sqr()
    } else {
        let pq = a[(p, q)];
        let qp = a[(q, p)];
        pq.norm_sqr() + qp.norm_sqr() + 2.0 * b2 * (pq * qp.conj()).re
    }
}

/// Probability of one photon in each of two disjoint rail sets.
pub fn coincidence_probability(state: &TwoPhotonState, arm_a: &[usize], arm_b: &[usize]) -> f64 {
    arm_a
        .iter()
        .flat_map(|&p| arm_b.iter().map(move |&q| (p, q)))
        .map(|(p, q)| detection_probability(state, p, q))
        .sum()
}

/// Coincidence probability of the HOM configuration (submodule plate at
/// 22.5 degrees, `|HV>` input) for wavepacket overlap `beta`.
pub fn hom_coincidence(beta: f64) -> Result<f64> {
    let net = submodule_network(HOM_POSITION_DEG);
    let input = TwoPhotonState::on_rails(
        net.n_spatial,
        (0, Polarization::H),
        (1, Polarization::V),
        cx(beta, 0.0),
    )?;
    let out = evolve_two_photons(&net, &input)?;
    let arm1 = [rail(1, Polarization::H), rail(1, Polarization::V)];
    let arm2 = [rail(2, Polarization::H), rail(2, Polarization::V)];
    Ok(coincidence_probability(&out, &arm1, &arm2))
}

/// Coincidence probability versus relative delay for a Gaussian wavepacket
/// overlap `beta(tau) = beta0 exp(-(tau / tau_c)^2)`.
pub fn hom_dip_scan(delays: &[f64], coherence_time: f64, beta0: f64) -> Result<Vec<(f64, f64)>> {
    if !(coherence_time > 0.0) {
        return Err(Error::InvalidParameter("coherence time must be positive"));
    }
    if !(0.0..=1.0).contains(&beta0) {
        return Err(Error::InvalidParameter("beta0 outside [0, 1]"));
    }
    delays
        .iter()
        .map(|&tau| {
            let beta = beta0 * (-(tau / coherence_time).powi(2)).exp();
            Ok((tau, hom_coincidence(beta)?))
        })
        .collect()
}

/// `(P_inf - P_0) / P_inf` with `P_inf` the fully distinguishable level.
pub fn hom_visibility(beta0: f64) -> Result<f64> {
    let far = hom_coincidence(0.0)?;
    let dip = hom_coincidence(beta0)?;
    Ok((far - dip) / far)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonic::{rail_basis, JonesElement};
    use alloc::vec;
    use core::f64::consts::FRAC_1_SQRT_2;
    use proptest::prelude::*;

    fn splitter() -> ModeNetwork {
        // 50:50 coupler between the H and V rails of one mode
        ModeNetwork::new(1).with(JonesElement::hwp(0, 22.5))
    }

    fn both_in(beta: f64) -> TwoPhotonState {
        TwoPhotonState::on_rails(1, (0, Polarization::H), (0, Polarization::V), cx(beta, 0.0))
            .unwrap()
    }

    #[test]
    fn hom_dip_on_a_splitter() {
        for (beta, expected) in
            [(1.0f64, 0.0), (0.0, 0.5), (HOM_VISIBILITY.sqrt(), (1.0 - HOM_VISIBILITY) / 2.0)]
        {
            let out = evolve_two_photons(&splitter(), &both_in(beta)).unwrap();
            let p = detection_probability(&out, 0, 1);
            assert!((p - expected).abs() < 1e-12, "beta={beta}: {p}");
        }
    }

    #[test]
    fn identity_network_changes_nothing() {
        let s = both_in(0.3);
        let out = evolve_two_photons(&ModeNetwork::new(1), &s).unwrap();
        assert!(out.amps().max_abs_diff(s.amps()) < 1e-15);
        assert_eq!(out.beta(), s.beta());
    }

    #[test]
    fn swap_network_exchanges_rails() {
        let s =
            TwoPhotonState::on_rails(2, (0, Polarization::V), (1, Polarization::V), cx(1.0, 0.0))
                .unwrap();
        let out = evolve_two_photons(&ModeNetwork::new(2).with(JonesElement::pbs(0)), &s).unwrap();
        assert!((out.amps()[(3, 1)] - cx(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rail_mismatch_is_an_error() {
        assert!(evolve_two_photons(&ModeNetwork::new(3), &both_in(1.0)).is_err());
    }

    #[test]
    fn overlapping_inputs_are_renormalized() {
        // both photons in the same single-photon mode: bunched pair
        let h = rail_basis(1, 0, Polarization::H);
        let s = TwoPhotonState::product(&h, &h, cx(1.0, 0.0)).unwrap();
        assert!((s.total_probability() - 1.0).abs() < 1e-12);
        assert!((detection_probability(&s, 0, 0) - 1.0).abs() < 1e-12);
        let d = [cx(FRAC_1_SQRT_2, 0.0), cx(FRAC_1_SQRT_2, 0.0)];
        let s = TwoPhotonState::product(&d, &h, cx(0.5, 0.0)).unwrap();
        assert!((s.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beta_above_one_rejected() {
        let h = rail_basis(1, 0, Polarization::H);
        assert!(TwoPhotonState::product(&h, &h, cx(1.1, 0.0)).is_err());
    }

    #[test]
    fn scan_shape() {
        let delays: Vec<f64> = (-20..=20).map(|k| k as f64 * 10.0).collect();
        let scan = hom_dip_scan(&delays, 50.0, 1.0).unwrap();
        let (_, p0) = scan[20];
        assert!(p0.abs() < 1e-12);
        assert!((scan[0].1 - 0.5).abs() < 1e-12);
        for k in 0..=20 {
            assert!((scan[k].1 - scan[40 - k].1).abs() < 1e-15);
        }
        assert!(hom_dip_scan(&delays, 0.0, 1.0).is_err());
        assert!((hom_visibility(HOM_VISIBILITY.sqrt()).unwrap() - HOM_VISIBILITY).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn coincidence_non_increasing_in_overlap(b1 in 0.0f64..1.0, b2 in 0.0f64..1.0) {
            let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
            let p_lo = detection_probability(&evolve_two_photons(&splitter(), &both_in(lo)).unwrap(), 0, 1);
            let p_hi = detection_probability(&evolve_two_photons(&splitter(), &both_in(hi)).unwrap(), 0, 1);
            prop_assert!(p_hi <= p_lo + 1e-15);
        }

        #[test]
        fn probability_conserved(theta in -90.0f64..90.0, phi in -90.0f64..90.0, beta in 0.0f64..1.0) {
            let net = ModeNetwork::new(2)
                .with(JonesElement::hwp(0, theta))
                .with(JonesElement::bd(0))
                .with(JonesElement::qwp(1, phi))
                .with(JonesElement::pbs(0));
            let s = TwoPhotonState::on_rails(2, (0, Polarization::H), (1, Polarization::V), cx(beta, 0.0)).unwrap();
            let out = evolve_two_photons(&net, &s).unwrap();
            prop_assert!((out.total_probability() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn limits_match_pure_and_classical_statistics() {
        let net = ModeNetwork::new(2)
            .with(JonesElement::hwp(0, 12.0))
            .with(JonesElement::pbs(0))
            .with(JonesElement::qwp(1, 31.0))
            .with(JonesElement::bd(0))
            .with(JonesElement::hwp(1, -7.0));
        let u = compile_network(&net).unwrap();
        let u = u.matrix();
        let a = rail_basis(2, 0, Polarization::H);
        let b = rail_basis(2, 1, Polarization::V);
        let ua = u.mul_vec(&a).unwrap();
        let ub = u.mul_vec(&b).unwrap();
        let n = 4;
        // indistinguishable: symmetrized pure state
        let out1 =
            evolve_two_photons(&net, &TwoPhotonState::product(&a, &b, cx(1.0, 0.0)).unwrap())
                .unwrap();
        // distinguishable: classical transfer probabilities
        let out0 =
            evolve_two_photons(&net, &TwoPhotonState::product(&a, &b, cx(0.0, 0.0)).unwrap())
                .unwrap();
        for p in 0..n {
            for q in p..n {
                let sym = if p == q {
                    2.0 * (ua[p] * ub[p]).norm_sqr()
                } else {
                    (ua[p] * ub[q] + ua[q] * ub[p]).norm_sqr()
                };
                assert!((detection_probability(&out1, p, q) - sym).abs() < 1e-12);
                let classical = if p == q {
                    ua[p].norm_sqr() * ub[p].norm_sqr()
                } else {
                    ua[p].norm_sqr() * ub[q].norm_sqr() + ua[q].norm_sqr() * ub[p].norm_sqr()
                };
                assert!((detection_probability(&out0, p, q) - classical).abs() < 1e-12);
            }
        }
        let _ = vec![0];
    }

    #[test]
    fn noise_params_validate() {
        assert!(NoiseParams::new(1.2, 1.0, 0.0).is_err());
        assert!(NoiseParams::new(0.5, -0.1, 0.0).is_err());
        let c = NoiseParams::calibrated();
        assert!((c.beta * c.beta - HOM_VISIBILITY).abs() < 1e-15);
    }
}
