//! Run configuration: an optional JSON file overlaid by command-line flags.
//!
//! Every field is optional. A command resolves the fields it uses, fills in
//! defaults, and echoes the resulting record into its output, so an artifact
//! always carries the exact parameters that produced it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::formats::{read_json, NoiseJson, ReadoutLabels};

/// Output encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Structured report.
    #[default]
    Json,
    /// Table.
    Csv,
}

/// Named noise starting point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NoisePreset {
    /// No imperfections.
    Ideal,
    /// The two measured visibilities.
    Calibrated,
}

/// Tomography setting family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SettingsChoice {
    /// All 36 pairs of H, V, D, A, R, L.
    Full,
    /// The 16 pairs of H, V, D, R.
    Minimal,
}

/// Delay grid of a HOM scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayGrid {
    /// First delay.
    pub start: f64,
    /// Last delay (inclusive when hit exactly).
    pub stop: f64,
    /// Spacing.
    pub step: f64,
}

impl DelayGrid {
    /// Delays from `start` to `stop`.
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if !(self.step > 0.0) || self.stop < self.start {
            return Err(CliError::Config("delay grid needs step > 0 and stop >= start".into()));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        if n > 1_000_000 {
            return Err(CliError::Config("delay grid has more than a million points".into()));
        }
        Ok((0..=n).map(|k| self.start + k as f64 * self.step).collect())
    }
}

/// Every tunable of every command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Random seed; 0 when not given.
    pub seed: Option<u64>,
    /// Output path; standard output when absent.
    pub out: Option<PathBuf>,
    /// Output encoding.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Qudit dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Shift of the permutation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Parity of the permutation, `+` or `-`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<String>,
    /// Inclusive dimension range for an ideal sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
    /// Noise starting point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_preset: Option<NoisePreset>,
    /// Noise fields overriding the preset.
    #[serde(skip_serializing_if = "NoiseJson::is_empty")]
    pub noise: NoiseJson,
    /// Post-selected events per run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Detector label of each logical outcome.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_labels: Option<ReadoutLabels>,
    /// HOM delay grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delays: Option<DelayGrid>,
    /// Peak wavepacket overlap of the HOM scan.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    /// Coherence time of the HOM scan, same unit as the delays.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_c: Option<f64>,
    /// Counts file for tomography.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts_file: Option<PathBuf>,
    /// Simulate tomography counts instead of reading them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<bool>,
    /// Events per tomography setting.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots_per_setting: Option<u64>,
    /// Tomography setting family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<SettingsChoice>,
    /// Where to write the simulated counts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emit_counts: Option<PathBuf>,
    /// Likelihood gain below which the MLE stops.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle_tolerance: Option<f64>,
    /// MLE iteration cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle_max_iterations: Option<usize>,
    /// Submodule plate angle to explore.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<f64>,
    /// Network description file to compile.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network_file: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        RunConfig {
            $($f: $top.$f.or($base.$f),)*
            noise: $base.noise.merged_under($top.noise),
        }
    };
}

impl RunConfig {
    /// Reads a config file.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    /// `self` with every field set in `top` replaced.
    pub fn overlaid_by(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top; seed, out, format, d, m, sign, dims, noise_preset, shots,
            readout_labels, delays, beta0, tau_c, counts_file, simulate, shots_per_setting,
            settings, emit_counts, mle_tolerance, mle_max_iterations, theta_deg, network_file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: RunConfig = serde_json::from_str(
            r#"{"seed": 1, "shots": 10, "noise": {"beta": 0.5, "mz_dephasing": 0.9}}"#,
        )
        .unwrap();
        let flags = RunConfig {
            seed: Some(2),
            noise: NoiseJson { beta: Some(0.7), ..Default::default() },
            ..Default::default()
        };
        let eff = file.overlaid_by(flags);
        assert_eq!(eff.seed, Some(2));
        assert_eq!(eff.shots, Some(10));
        assert_eq!(eff.noise.beta, Some(0.7));
        assert_eq!(eff.noise.mz_dephasing, Some(0.9));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 1}"#).is_err());
    }

    #[test]
    fn delay_grid() {
        let g = DelayGrid { start: -1.0, stop: 1.0, step: 0.5 };
        assert_eq!(g.points().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(DelayGrid { start: 0.0, stop: 1.0, step: 0.0 }.points().is_err());
    }
}
