//! JSON shapes of everything that crosses a file boundary.
//!
//! Complex numbers are `[re, im]` pairs, matrices are lists of rows.
//! Probabilities are rounded to six decimals on output.

use std::collections::BTreeMap;
use std::path::Path;

use qudit_parity_core::c64;
use qudit_parity_core::linalg::{cx, CMatrix};
use qudit_parity_core::photonic::{ElementKind, JonesElement, ModeNetwork};
use qudit_parity_core::tomography::{CountTable, Projector, TomographySetting, TomographySettings};
use qudit_parity_core::two_photon::{CoincidenceRecord, NoiseParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Rounds to six decimals, the precision of every printed probability.
pub fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    // avoid "-0.0"
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `[re, im]`.
pub fn complex_json(z: c64) -> [f64; 2] {
    [z.re, z.im]
}

/// Amplitude list as `[[re, im], ...]`.
pub fn vector_json(v: &[c64]) -> Vec<[f64; 2]> {
    v.iter().map(|&z| complex_json(z)).collect()
}

/// Matrix as a list of rows of `[re, im]`.
pub fn matrix_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| complex_json(m[(i, j)])).collect()).collect()
}

/// Inverse of [`matrix_json`].
pub fn matrix_from_json(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Format("matrix must be square".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| cx(rows[i][j][0], rows[i][j][1])))
}

/// Noise configuration. Every field is optional so a file may override
/// only part of a preset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseJson {
    /// Wavepacket overlap (the HOM visibility is its square).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Arm coherence factor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mz_dephasing: Option<f64>,
    /// Per-photon readout flip probability.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_flip: Option<f64>,
}

impl NoiseJson {
    /// Fields of `self` over `base`.
    pub fn over(&self, base: NoiseParams) -> Result<NoiseParams, CliError> {
        Ok(NoiseParams::new(
            self.beta.unwrap_or(base.beta),
            self.mz_dephasing.unwrap_or(base.mz_dephasing),
            self.readout_flip.unwrap_or(base.readout_flip),
        )?)
    }

    /// Fully specified record of `n`.
    pub fn from_params(n: &NoiseParams) -> Self {
        NoiseJson {
            beta: Some(n.beta),
            mz_dephasing: Some(n.mz_dephasing),
            readout_flip: Some(n.readout_flip),
        }
    }

    /// True when no field is set.
    pub fn is_empty(&self) -> bool {
        self.beta.is_none() && self.mz_dephasing.is_none() && self.readout_flip.is_none()
    }

    /// `self` with the fields of `top` taking precedence.
    pub fn merged_under(self, top: NoiseJson) -> NoiseJson {
        NoiseJson {
            beta: top.beta.or(self.beta),
            mz_dephasing: top.mz_dephasing.or(self.mz_dephasing),
            readout_flip: top.readout_flip.or(self.readout_flip),
        }
    }
}

/// Detector label of each logical outcome, photon 1 first.
pub type ReadoutLabels = [String; 4];

/// Labels implied by the binary encoding: `j = 2 p1 + p2`, H = 0.
pub fn default_readout_labels() -> ReadoutLabels {
    ["HH", "HV", "VH", "VV"].map(String::from)
}

/// Checks that `labels` is a permutation of the four detector pairs.
pub fn validate_readout_labels(labels: &ReadoutLabels) -> Result<(), CliError> {
    let mut sorted = labels.clone();
    sorted.sort();
    if sorted != default_readout_labels() {
        return Err(CliError::Config(format!(
            "readout_labels must be a permutation of HH, HV, VH, VV, got {labels:?}"
        )));
    }
    Ok(())
}

/// Coincidence record as `{"HH": n, "HV": n, "VH": n, "VV": n, "shots": N, "seed": s}`.
pub fn coincidence_json(rec: &CoincidenceRecord, labels: &ReadoutLabels) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (j, label) in labels.iter().enumerate() {
        map.insert(label.clone(), rec.counts[j].into());
    }
    map.insert("shots".into(), rec.shots.into());
    map.insert("seed".into(), rec.seed.into());
    serde_json::Value::Object(map)
}

/// One element of a network description file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    /// `HWP`, `QWP`, `PBS`, `BD` or `PHASE` (case-insensitive).
    pub kind: String,
    /// Angle in degrees; ignored for `PBS` and `BD`.
    #[serde(default)]
    pub theta_deg: f64,
    /// Spatial mode.
    pub mode: usize,
    /// Undo a displacement (`BD` only).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reverse: bool,
}

/// Network description file: spatial mode count plus the ordered elements.
/// A bare list of elements is also accepted; the mode count is then one
/// more than the largest mode named (two more if a PBS or BD sits there).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkJson {
    /// `{"n_spatial": n, "elements": [...]}`.
    Full {
        /// Spatial modes.
        n_spatial: usize,
        /// Elements in order.
        elements: Vec<ElementJson>,
    },
    /// `[...]`.
    Bare(Vec<ElementJson>),
}

fn element(e: &ElementJson) -> Result<JonesElement, CliError> {
    let el = match e.kind.to_ascii_uppercase().as_str() {
        "HWP" => JonesElement::hwp(e.mode, e.theta_deg),
        "QWP" => JonesElement::qwp(e.mode, e.theta_deg),
        "PBS" => JonesElement::pbs(e.mode),
        "BD" if e.reverse => JonesElement::bd_reverse(e.mode),
        "BD" => JonesElement::bd(e.mode),
        "PHASE" => JonesElement::phase(e.mode, e.theta_deg),
        other => return Err(CliError::Format(format!("unknown element kind {other:?}"))),
    };
    if e.reverse && el.kind != ElementKind::Bd {
        return Err(CliError::Format("reverse is only meaningful for BD".into()));
    }
    Ok(el)
}

impl NetworkJson {
    /// Builds the network.
    pub fn to_network(&self) -> Result<ModeNetwork, CliError> {
        let (n, elements) = match self {
            NetworkJson::Full { n_spatial, elements } => (*n_spatial, elements),
            NetworkJson::Bare(elements) => {
                let n = elements
                    .iter()
                    .map(|e| {
                        let two_mode = matches!(e.kind.to_ascii_uppercase().as_str(), "PBS" | "BD");
                        e.mode + if two_mode { 2 } else { 1 }
                    })
                    .max()
                    .unwrap_or(1);
                (n, elements)
            }
        };
        let mut net = ModeNetwork::new(n);
        for e in elements {
            net = net.with(element(e)?);
        }
        Ok(net)
    }
}

/// One entry of a counts file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsEntry {
    /// Projector letters for photon 1 and photon 2.
    pub setting: [String; 2],
    /// Counts keyed by outcome label, e.g. `"HV"` for setting `(H, V)`.
    pub counts: BTreeMap<String, f64>,
}

fn projector(s: &str) -> Result<Projector, CliError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Projector::from_label(c)
            .ok_or_else(|| CliError::Format(format!("unknown projector {s:?}"))),
        _ => Err(CliError::Format(format!("projector must be one letter, got {s:?}"))),
    }
}

fn outcome_labels(s: &TomographySetting) -> [String; 4] {
    let (a, a_) = (s.first.label(), s.first.orthogonal().label());
    let (b, b_) = (s.second.label(), s.second.orthogonal().label());
    [format!("{a}{b}"), format!("{a}{b_}"), format!("{a_}{b}"), format!("{a_}{b_}")]
}

/// Counts table to file entries.
pub fn counts_to_json(table: &CountTable) -> Vec<CountsEntry> {
    table
        .settings
        .settings()
        .iter()
        .zip(&table.counts)
        .map(|(s, row)| CountsEntry {
            setting: [s.first.label().to_string(), s.second.label().to_string()],
            counts: outcome_labels(s).into_iter().zip(row.iter().copied()).collect(),
        })
        .collect()
}

/// File entries to a validated counts table. Missing outcomes count zero.
pub fn counts_from_json(entries: &[CountsEntry]) -> Result<CountTable, CliError> {
    let mut settings = Vec::with_capacity(entries.len());
    let mut rows = Vec::with_capacity(entries.len());
    for e in entries {
        let s = TomographySetting {
            first: projector(&e.setting[0])?,
            second: projector(&e.setting[1])?,
        };
        let labels = outcome_labels(&s);
        if let Some(bad) = e.counts.keys().find(|k| !labels.contains(k)) {
            return Err(CliError::Format(format!(
                "outcome {bad:?} does not belong to setting {}{}",
                e.setting[0], e.setting[1]
            )));
        }
        rows.push(labels.map(|l| e.counts.get(&l).copied().unwrap_or(0.0)));
        settings.push(s);
    }
    Ok(CountTable::new(TomographySettings::new(settings)?, rows)?)
}

/// Reads and parses a JSON file.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qudit_parity_core::tomography::{expected_counts, DensityMatrix};

    #[test]
    fn rounding() {
        assert_eq!(round6(0.1234564), 0.123456);
        assert_eq!(round6(-1e-9), 0.0);
        assert!(round6(-1e-9).is_sign_positive());
    }

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(3, 3, |i, j| cx(i as f64, -(j as f64)));
        assert_eq!(matrix_from_json(&matrix_json(&m)).unwrap(), m);
        assert!(matrix_from_json(&[vec![[0.0, 0.0]; 2]]).is_err());
    }

    #[test]
    fn counts_round_trip() {
        let rho = DensityMatrix::new(CMatrix::identity(4).scale(cx(0.25, 0.0))).unwrap();
        let table = expected_counts(&rho, &TomographySettings::minimal(), 100.0).unwrap();
        let json = serde_json::to_string(&counts_to_json(&table)).unwrap();
        let back: Vec<CountsEntry> = serde_json::from_str(&json).unwrap();
        assert_eq!(counts_from_json(&back).unwrap(), table);
    }

    #[test]
    fn counts_with_foreign_outcome_rejected() {
        let e = CountsEntry {
            setting: ["H".into(), "V".into()],
            counts: [("DA".to_string(), 3.0)].into_iter().collect(),
        };
        assert!(counts_from_json(&[e]).is_err());
    }

    #[test]
    fn network_file_forms() {
        let full: NetworkJson = serde_json::from_str(
            r#"{"n_spatial": 2, "elements": [{"kind": "BD", "mode": 0}, {"kind": "hwp", "theta_deg": 22.5, "mode": 1}, {"kind": "BD", "mode": 0, "reverse": true}]}"#,
        )
        .unwrap();
        let net = full.to_network().unwrap();
        assert_eq!(net.n_spatial, 2);
        assert_eq!(net.elements.len(), 3);
        assert!(net.elements[2].reverse);
        let bare: NetworkJson = serde_json::from_str(r#"[{"kind": "PBS", "mode": 1}]"#).unwrap();
        assert_eq!(bare.to_network().unwrap().n_spatial, 3);
        let bad: NetworkJson = serde_json::from_str(r#"[{"kind": "LENS", "mode": 0}]"#).unwrap();
        assert!(bad.to_network().is_err());
    }

    #[test]
    fn readout_labels_must_be_a_permutation() {
        assert!(validate_readout_labels(&default_readout_labels()).is_ok());
        let bad = ["HH", "HV", "HV", "VV"].map(String::from);
        assert!(validate_readout_labels(&bad).is_err());
    }

    #[test]
    fn noise_overlay() {
        let partial = NoiseJson { beta: Some(0.5), ..Default::default() };
        let n = partial.over(NoiseParams::calibrated()).unwrap();
        assert_eq!(n.beta, 0.5);
        assert_eq!(n.mz_dephasing, NoiseParams::calibrated().mz_dephasing);
        let bad = NoiseJson { readout_flip: Some(2.0), ..Default::default() };
        assert!(bad.over(NoiseParams::ideal()).is_err());
    }
}
