//! Jones-calculus optics on an array of spatial modes.
//!
//! A photon lives on *rails*: pairs of (spatial mode, polarization), indexed
//! contiguously as `2 * mode + pol` with `H = 0`, `V = 1`. Wave plates act
//! on the two rails of one mode; beam displacers and polarizing beam
//! splitters permute rails between modes. All element transforms are
//! unitary, so loss only ever appears through post-selection downstream.
//!
//! Jones conventions: the half-wave plate with fast axis at `theta` is
//! `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`, the quarter-wave plate is
//! `R(theta) diag(1, i) R(-theta)` with the counter-clockwise rotation `R`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

#[allow(unused_imports)] // needed without std for the libm-backed methods
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c64, cx, expi, CMatrix};
use crate::qudit::UnitaryOp;

/// Photon polarization; `H` encodes logical 0 and `V` logical 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Horizontal.
    H,
    /// Vertical.
    V,
}

impl Polarization {
    /// Offset within a spatial mode's rail pair.
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    /// From a logical bit.
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Polarization::H
        } else {
            Polarization::V
        }
    }

    /// `'H'` or `'V'`.
    pub fn label(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
        }
    }
}

/// Polarization walked off by a beam displacer unless a network overrides it.
pub const BD_DISPLACED: Polarization = Polarization::H;

/// Rail index of `(mode, pol)`.
pub fn rail(mode: usize, pol: Polarization) -> usize {
    2 * mode + pol.index()
}

/// Optical element types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    /// Half-wave plate.
    Hwp,
    /// Quarter-wave plate.
    Qwp,
    /// Polarizing beam splitter: transmits H, reflects V into the next mode.
    Pbs,
    /// Beam displacer: walks one polarization into the neighbouring mode.
    Bd,
    /// Common phase `exp(i theta)` on both polarizations of a mode.
    Phase,
}

/// One element placed on the mode array.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesElement {
    /// Element type.
    pub kind: ElementKind,
    /// Fast-axis angle for wave plates, phase for `Phase`; ignored otherwise. Degrees.
    pub theta_deg: f64,
    /// Spatial mode the element sits on (first mode for `Pbs` and `Bd`).
    pub mode: usize,
    /// Beam displacer oriented to walk back towards lower modes.
    pub reverse: bool,
}

impl JonesElement {
    /// Half-wave plate at `theta_deg` on `mode`.
    pub fn hwp(mode: usize, theta_deg: f64) -> Self {
        JonesElement { kind: ElementKind::Hwp, theta_deg, mode, reverse: false }
    }

    /// Quarter-wave plate at `theta_deg` on `mode`.
    pub fn qwp(mode: usize, theta_deg: f64) -> Self {
        JonesElement { kind: ElementKind::Qwp, theta_deg, mode, reverse: false }
    }

    /// Polarizing beam splitter between `mode` and `mode + 1`.
    pub fn pbs(mode: usize) -> Self {
        JonesElement { kind: ElementKind::Pbs, theta_deg: 0.0, mode, reverse: false }
    }

    /// Beam displacer spanning modes `mode..`, walking towards higher modes.
    pub fn bd(mode: usize) -> Self {
        JonesElement { kind: ElementKind::Bd, theta_deg: 0.0, mode, reverse: false }
    }

    /// Beam displacer walking towards lower modes; undoes [`JonesElement::bd`].
    pub fn bd_reverse(mode: usize) -> Self {
        JonesElement { kind: ElementKind::Bd, theta_deg: 0.0, mode, reverse: true }
    }

    /// Phase `exp(i theta)` on `mode`.
    pub fn phase(mode: usize, theta_deg: f64) -> Self {
        JonesElement { kind: ElementKind::Phase, theta_deg, mode, reverse: false }
    }

    /// Jones matrix of a single-mode element, `None` for `Pbs` and `Bd`.
    pub fn jones(&self) -> Option<[[c64; 2]; 2]> {
        match self.kind {
            ElementKind::Hwp => Some(hwp_matrix(self.theta_deg)),
            ElementKind::Qwp => Some(qwp_matrix(self.theta_deg)),
            ElementKind::Phase => {
                let p = expi(self.theta_deg.to_radians());
                Some([[p, cx(0.0, 0.0)], [cx(0.0, 0.0), p]])
            }
            ElementKind::Pbs | ElementKind::Bd => None,
        }
    }
}

/// Half-wave plate Jones matrix in the `(H, V)` basis.
pub fn hwp_matrix(theta_deg: f64) -> [[c64; 2]; 2] {
    let t = 2.0 * theta_deg.to_radians();
    let (s, c) = (t.sin(), t.cos());
    [[cx(c, 0.0), cx(s, 0.0)], [cx(s, 0.0), cx(-c, 0.0)]]
}

/// Quarter-wave plate Jones matrix, `R(theta) diag(1, i) R(-theta)`.
pub fn qwp_matrix(theta_deg: f64) -> [[c64; 2]; 2] {
    let t = theta_deg.to_radians();
    let (s, c) = (t.sin(), t.cos());
    let i = cx(0.0, 1.0);
    [
        [cx(c * c, 0.0) + i * (s * s), cx(c * s, 0.0) - i * (c * s)],
        [cx(c * s, 0.0) - i * (c * s), cx(s * s, 0.0) + i * (c * c)],
    ]
}

/// 2x2 Jones matrix as a [`CMatrix`].
pub fn jones_to_matrix(j: &[[c64; 2]; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |r, c| j[r][c])
}

/// Applies a Jones matrix to a polarization vector.
pub fn apply_jones(j: &[[c64; 2]; 2], v: [c64; 2]) -> [c64; 2] {
    [j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]]
}

/// Ordered element list over `n_spatial` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeNetwork {
    /// Number of spatial modes.
    pub n_spatial: usize,
    /// Elements in the order light meets them.
    pub elements: Vec<JonesElement>,
    /// Polarization walked off by every beam displacer.
    pub bd_displaced: Polarization,
}

impl ModeNetwork {
    /// Empty network.
    pub fn new(n_spatial: usize) -> Self {
        ModeNetwork { n_spatial, elements: Vec::new(), bd_displaced: BD_DISPLACED }
    }

    /// Builder-style append.
    pub fn with(mut self, el: JonesElement) -> Self {
        self.elements.push(el);
        self
    }

    /// Number of rails.
    pub fn n_rails(&self) -> usize {
        2 * self.n_spatial
    }
}

fn element_transform(
    el: &JonesElement,
    n_spatial: usize,
    displaced: Polarization,
) -> Result<CMatrix> {
    let n = 2 * n_spatial;
    if el.mode >= n_spatial {
        return Err(Error::Configuration("element placed beyond the last spatial mode"));
    }
    if let Some(j) = el.jones() {
        let mut m = CMatrix::identity(n);
        let base = 2 * el.mode;
        for r in 0..2 {
            for c in 0..2 {
                m[(base + r, base + c)] = j[r][c];
            }
        }
        return Ok(m);
    }
    // rail permutation: perm[input] = output
    let mut perm: Vec<usize> = (0..n).collect();
    match el.kind {
        ElementKind::Pbs => {
            if el.mode + 1 >= n_spatial {
                return Err(Error::Configuration("PBS reflects past the last spatial mode"));
            }
            let a = rail(el.mode, Polarization::V);
            let b = rail(el.mode + 1, Polarization::V);
            perm.swap(a, b);
        }
        ElementKind::Bd => {
            if el.mode + 1 >= n_spatial {
                return Err(Error::Configuration("BD displaces past the last spatial mode"));
            }
            // cyclic walk within modes el.mode..n_spatial; the rail vacated at
            // the first mode is fed from the last, which a physical layout
            // leaves dark
            let span = n_spatial - el.mode;
            for k in 0..span {
                let from = el.mode + k;
                let to = if el.reverse {
                    el.mode + (k + span - 1) % span
                } else {
                    el.mode + (k + 1) % span
                };
                perm[rail(from, displaced)] = rail(to, displaced);
            }
        }
        _ => unreachable!("single-mode elements handled above"),
    }
    let mut m = CMatrix::zeros(n, n);
    for (input, &output) in perm.iter().enumerate() {
        m[(output, input)] = cx(1.0, 0.0);
    }
    Ok(m)
}

/// Product of the element transforms in declared order, as a unitary on rails.
pub fn compile_network(net: &ModeNetwork) -> Result<UnitaryOp> {
    if net.n_spatial == 0 {
        return Err(Error::Configuration("network needs at least one spatial mode"));
    }
    let mut total = CMatrix::identity(net.n_rails());
    for el in &net.elements {
        let t = element_transform(el, net.n_spatial, net.bd_displaced)?;
        total = &t * &total;
    }
    UnitaryOp::new(total)
}

/// Single-photon rail amplitudes after the network.
pub fn propagate(net: &ModeNetwork, input: &[c64]) -> Result<Vec<c64>> {
    compile_network(net)?.matrix().mul_vec(input)
}

/// Rail vector with one photon on `(mode, pol)`.
pub fn rail_basis(n_spatial: usize, mode: usize, pol: Polarization) -> Vec<c64> {
    let mut v = vec![cx(0.0, 0.0); 2 * n_spatial];
    v[rail(mode, pol)] = cx(1.0, 0.0);
    v
}

/// Wave-plate angles of the state-preparation stage.
///
/// Photon 1 enters horizontal on mode 0, photon 2 vertical on mode 1. The
/// plates turn them into `(H - V)/sqrt 2` and `(H + iV)/sqrt 2`, whose
/// product is the Fourier transform of `|1>` under the two-qubit encoding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreparationSettings {
    /// Half-wave plate on photon 1.
    pub photon1_hwp_deg: f64,
    /// Half-wave plate on photon 2.
    pub photon2_hwp_deg: f64,
    /// Quarter-wave plate on photon 2, after its half-wave plate.
    pub photon2_qwp_deg: f64,
}

/// Angles producing the Fourier-transformed input state.
pub fn prepare_eq3_settings() -> PreparationSettings {
    // H -> (cos 2t, sin 2t) = (1, -1)/sqrt2 at t = -22.5;
    // V -> (sin 2t, -cos 2t) = (1, 1)/sqrt2 at t = 67.5, then diag(1, i).
    PreparationSettings { photon1_hwp_deg: -22.5, photon2_hwp_deg: 67.5, photon2_qwp_deg: 0.0 }
}

impl PreparationSettings {
    /// Two-mode network holding the three plates.
    pub fn network(&self) -> ModeNetwork {
        ModeNetwork::new(2)
            .with(JonesElement::hwp(0, self.photon1_hwp_deg))
            .with(JonesElement::hwp(1, self.photon2_hwp_deg))
            .with(JonesElement::qwp(1, self.photon2_qwp_deg))
    }

    /// Polarization states of both photons after the plates.
    pub fn photon_states(&self) -> Result<([c64; 2], [c64; 2])> {
        let net = self.network();
        let u = compile_network(&net)?;
        let p1 = u.matrix().mul_vec(&rail_basis(2, 0, Polarization::H))?;
        let p2 = u.matrix().mul_vec(&rail_basis(2, 1, Polarization::V))?;
        Ok(([p1[0], p1[1]], [p2[2], p2[3]]))
    }
}

/// Beam-displacer Mach-Zehnder: the first displacer splits a diagonal input
/// into two arms, `arm_phase_deg` sits on the walked-off arm, the reversed
/// displacer recombines. Returns the probability of finding the photon
/// diagonal at the output when the coherence between the arms is scaled by
/// `coherence` (1 for ideal optics).
pub fn mz_diagonal_probability(arm_phase_deg: f64, coherence: f64) -> Result<f64> {
    let split = ModeNetwork::new(2).with(JonesElement::bd(0));
    let rest = ModeNetwork::new(2)
        .with(JonesElement::phase(1, arm_phase_deg))
        .with(JonesElement::bd_reverse(0));
    let input = {
        let mut v = vec![cx(0.0, 0.0); 4];
        v[rail(0, Polarization::H)] = cx(FRAC_1_SQRT_2, 0.0);
        v[rail(0, Polarization::V)] = cx(FRAC_1_SQRT_2, 0.0);
        v
    };
    let after_split = propagate(&split, &input)?;
    let mut rho = CMatrix::outer(&after_split);
    // arms: walked-off rail vs straight rail
    let walked = rail(1, BD_DISPLACED);
    let straight = rail(0, Polarization::V);
    for (a, b) in [(walked, straight), (straight, walked)] {
        rho[(a, b)] *= coherence;
    }
    let u = compile_network(&rest)?;
    let out = u.matrix().conjugate(&rho);
    let d = [cx(FRAC_1_SQRT_2, 0.0), cx(FRAC_1_SQRT_2, 0.0)];
    let (h, v) = (rail(0, Polarization::H), rail(0, Polarization::V));
    let p = (d[0].conj() * d[0] * out[(h, h)]
        + d[0].conj() * d[1] * out[(h, v)]
        + d[1].conj() * d[0] * out[(v, h)]
        + d[1].conj() * d[1] * out[(v, v)])
        .re;
    Ok(p)
}

/// Fringe visibility `(max - min) / (max + min)` of the Mach-Zehnder over a
/// full phase scan.
pub fn mz_visibility(coherence: f64) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for step in 0..=360 {
        let p = mz_diagonal_probability(step as f64, coherence)?;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    Ok((hi - lo) / (hi + lo))
}
