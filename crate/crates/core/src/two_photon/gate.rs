//! The post-selected two-photon submodule and the four-level oracle gates.
//!
//! The submodule is a displacer, a half-wave plate across the three inner
//! modes and a second displacer. Photon 1 (first qubit) enters mode 0,
//! photon 2 (second qubit) enters mode 1; an event counts when one photon
//! leaves mode 1 and the other mode 2. With `s = sin 2t`, `c = cos 2t` the
//! surviving amplitudes are
//!
//! ```text
//! photon 1 in mode 1, photon 2 in mode 2:  s^2 (X (x) X)
//! photon 2 in mode 1, photon 1 in mode 2: -c^2 |VH><HV|
//! ```
//!
//! At `s^2 = 1/3` their coherent sum is a controlled-Z up to local bit
//! flips, heralded with probability 1/9. At 45 degrees the second path is
//! dark and the module is a plain `X (x) X`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[allow(unused_imports)] // needed without std for the libm-backed methods
use num_traits::Float;

use super::NoiseParams;
use crate::error::{Error, Result};
use crate::linalg::{cx, CMatrix};
use crate::photonic::{compile_network, rail, JonesElement, ModeNetwork, Polarization};
use crate::qudit::{PermutationSpec, Sign, UnitaryOp};

/// Nominal plate angle selecting the controlled gate.
pub const CNOT_POSITION_DEG: f64 = 17.5;
/// Plate angle selecting `X (x) X`.
pub const X_POSITION_DEG: f64 = 45.0;
/// Plate angle turning the module into a balanced splitter for `|HV>`.
pub const HOM_POSITION_DEG: f64 = 22.5;

const ANGLE_TOL: f64 = 1e-9;

/// Plate angle where the submodule is exactly a controlled-Z class gate,
/// `asin(1/sqrt 3) / 2` in degrees.
pub fn ideal_coupler_deg() -> f64 {
    0.5 * (1.0 / 3f64.sqrt()).asin() * 180.0 / PI
}

/// Rail network of the submodule with the inner plate at `theta_deg`.
pub fn submodule_network(theta_deg: f64) -> ModeNetwork {
    ModeNetwork::new(4)
        .with(JonesElement::bd(0))
        .with(JonesElement::hwp(0, theta_deg))
        .with(JonesElement::hwp(1, theta_deg))
        .with(JonesElement::hwp(2, theta_deg))
        .with(JonesElement::bd(0))
}

/// Post-selected transfer maps of the submodule. Input index `2 t + c`
/// (photon 1 polarization `t`, photon 2 polarization `c`, H = 0), output
/// index `2 p1 + p2` with `p1`, `p2` the polarizations found in modes 1
/// and 2.
#[derive(Clone, Debug, PartialEq)]
pub struct SubmoduleMap {
    /// Photon 1 leaves mode 1, photon 2 leaves mode 2.
    pub direct: CMatrix,
    /// Photon 2 leaves mode 1, photon 1 leaves mode 2.
    pub exchanged: CMatrix,
}

impl SubmoduleMap {
    /// Map for perfectly overlapping photons.
    pub fn coherent(&self) -> CMatrix {
        &self.direct + &self.exchanged
    }
}

/// Computes the submodule maps by propagating every input rail pair.
pub fn submodule_postselected_map(theta_deg: f64) -> Result<SubmoduleMap> {
    let net = submodule_network(theta_deg);
    let u = compile_network(&net)?;
    let u = u.matrix();
    let pols = [Polarization::H, Polarization::V];
    let mut direct = CMatrix::zeros(4, 4);
    let mut exchanged = CMatrix::zeros(4, 4);
    for (t, &pt) in pols.iter().enumerate() {
        for (c, &pc) in pols.iter().enumerate() {
            let input = 2 * t + c;
            let (r1, r2) = (rail(0, pt), rail(1, pc));
            for (p1, &q1) in pols.iter().enumerate() {
                for (p2, &q2) in pols.iter().enumerate() {
                    let out = 2 * p1 + p2;
                    let (a1, a2) = (rail(1, q1), rail(2, q2));
                    direct[(out, input)] = u[(a1, r1)] * u[(a2, r2)];
                    exchanged[(out, input)] = u[(a2, r1)] * u[(a1, r2)];
                }
            }
        }
    }
    Ok(SubmoduleMap { direct, exchanged })
}

fn x() -> CMatrix {
    CMatrix::from_rows(2, 2, alloc::vec![cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)])
        .expect("2x2")
}

fn hadamard() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    CMatrix::from_rows(2, 2, alloc::vec![cx(h, 0.0), cx(h, 0.0), cx(h, 0.0), cx(-h, 0.0)])
        .expect("2x2")
}

fn id2() -> CMatrix {
    CMatrix::identity(2)
}

/// Noisy post-selected gate on two polarization qubits.
///
/// The state is first taken into the submodule frame by `pre`, both qubits
/// lose arm coherence there, the submodule acts (coherently with weight
/// `beta^2`, as two separate paths otherwise) and `post` maps back.
#[derive(Clone, Debug, PartialEq)]
pub struct GateChannel {
    /// Local operation before the submodule.
    pub pre: CMatrix,
    /// Submodule transfer maps.
    pub map: SubmoduleMap,
    /// Local operation after the submodule.
    pub post: CMatrix,
}

impl GateChannel {
    /// Bare submodule at an arbitrary plate angle.
    pub fn at_angle(theta_deg: f64) -> Result<Self> {
        Ok(GateChannel {
            pre: CMatrix::identity(4),
            map: submodule_postselected_map(theta_deg)?,
            post: CMatrix::identity(4),
        })
    }

    /// CNOT with the second qubit as control, built from the submodule at
    /// [`ideal_coupler_deg`] with Hadamards and bit flips around it.
    pub fn cnot() -> Result<Self> {
        let h1 = hadamard().kron(&id2());
        let x1 = x().kron(&id2());
        let x2 = id2().kron(&x());
        Ok(GateChannel {
            pre: &x1 * &h1,
            map: submodule_postselected_map(ideal_coupler_deg())?,
            post: &h1 * &x2,
        })
    }

    /// `X (x) X` from the submodule at 45 degrees.
    pub fn flip_both() -> Result<Self> {
        GateChannel::at_angle(X_POSITION_DEG)
    }

    /// Noiseless heralded operator `post A pre`.
    pub fn ideal_operator(&self) -> CMatrix {
        &(&self.post * &self.map.coherent()) * &self.pre
    }

    /// Applies the channel to a two-qubit density matrix. Returns the
    /// normalized output and the heralding probability.
    pub fn apply(&self, rho: &CMatrix, noise: &NoiseParams) -> Result<(CMatrix, f64)> {
        if rho.rows() != 4 || !rho.is_square() {
            return Err(Error::DimensionMismatch { expected: 4, found: rho.rows() });
        }
        let framed = dephase(&self.pre.conjugate(rho), noise.mz_dephasing);
        let b2 = noise.beta * noise.beta;
        let coherent = self.map.coherent().conjugate(&framed).scale(cx(b2, 0.0));
        let separate = &self.map.direct.conjugate(&framed) + &self.map.exchanged.conjugate(&framed);
        let mixed = &coherent + &separate.scale(cx(1.0 - b2, 0.0));
        let out = self.post.conjugate(&mixed);
        let weight = out.trace().re;
        if !(weight > 0.0) {
            return Err(Error::NotPhysical("no heralded events"));
        }
        Ok((out.scale(cx(1.0 / weight, 0.0)), weight))
    }
}

/// Multiplies every coherence between different values of a qubit by `v`,
/// for both qubits.
pub(crate) fn dephase(rho: &CMatrix, v: f64) -> CMatrix {
    CMatrix::from_fn(4, 4, |i, j| {
        let flips = ((i ^ j) & 2 != 0) as i32 + ((i ^ j) & 1 != 0) as i32;
        rho[(i, j)] * v.powi(flips)
    })
}

/// Plate angles for one oracle. `None` means the plate is removed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitSettings {
    /// Submodule plate.
    pub hwp2_deg: f64,
    /// Bit flip on photon 1 after the submodule.
    pub hwp4_deg: Option<f64>,
    /// Bit flip on photon 2 after the submodule.
    pub hwp5_deg: Option<f64>,
}

/// Plate settings realizing `spec` for `d = 4`.
pub fn plate_settings(spec: &PermutationSpec) -> Result<CircuitSettings> {
    if spec.dim() != 4 {
        return Err(Error::UnsupportedInHardware(spec.dim()));
    }
    let c = CNOT_POSITION_DEG;
    let x = X_POSITION_DEG;
    let (hwp2_deg, hwp4_deg, hwp5_deg) = match (spec.sign(), spec.m()) {
        (Sign::Positive, 0) => (x, Some(x), Some(x)),
        (Sign::Positive, 1) => (c, None, Some(x)),
        (Sign::Positive, 2) => (x, None, Some(x)),
        (Sign::Positive, 3) => (c, Some(x), Some(x)),
        (Sign::Negative, 0) => (c, None, None),
        (Sign::Negative, 1) => (x, Some(x), None),
        (Sign::Negative, 2) => (c, Some(x), None),
        (Sign::Negative, _) => (x, None, None),
        (Sign::Positive, _) => unreachable!("m < d"),
    };
    Ok(CircuitSettings { hwp2_deg, hwp4_deg, hwp5_deg })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < ANGLE_TOL
}

impl CircuitSettings {
    /// Submodule channel selected by the submodule plate.
    pub fn core_channel(&self) -> Result<GateChannel> {
        if close(self.hwp2_deg, CNOT_POSITION_DEG) {
            GateChannel::cnot()
        } else if close(self.hwp2_deg, X_POSITION_DEG) {
            GateChannel::flip_both()
        } else {
            Err(Error::InconsistentSettings("submodule plate must sit at 17.5 or 45 degrees"))
        }
    }

    /// Local flips after the submodule.
    pub fn flips(&self) -> Result<CMatrix> {
        let one = |p: Option<f64>| match p {
            None => Ok(id2()),
            Some(a) if close(a, X_POSITION_DEG) => Ok(x()),
            Some(_) => Err(Error::InconsistentSettings("flip plates must sit at 45 degrees")),
        };
        Ok(one(self.hwp4_deg)?.kron(&one(self.hwp5_deg)?))
    }
}

/// Ideal two-qubit unitary implemented by a set of plate angles.
pub fn logical_gate_for_settings(settings: &CircuitSettings) -> Result<UnitaryOp> {
    let core = settings.core_channel()?.ideal_operator();
    let norm = core.frobenius_norm() / 2.0;
    let core = core.scale(cx(1.0 / norm, 0.0));
    UnitaryOp::new(&settings.flips()? * &core)
}

/// Logical gates of all oracles in canonical order.
pub fn all_plate_settings() -> Result<Vec<(PermutationSpec, CircuitSettings)>> {
    PermutationSpec::all(4)?.into_iter().map(|s| Ok((s, plate_settings(&s)?))).collect()
}
