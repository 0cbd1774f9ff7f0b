use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Spectrum,
    Match,
    Evolve,
    Compare,
    Trotter,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Match => "match",
            Mode::Evolve => "evolve",
            Mode::Compare => "compare",
            Mode::Trotter => "trotter",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    TwoAtom,
    ThreeAtom,
    FourAtom,
    SixAtom,
}

impl SystemKind {
    pub fn two_spin(self) -> bool {
        matches!(self, SystemKind::FourAtom | SystemKind::SixAtom)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetSpec {
    pub u: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    /// Chain length for `spectrum`; omitted means the one- or two-spin model.
    pub n_sites: Option<usize>,
    pub m_max: Option<u32>,
    pub periodic: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulatorSpec {
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    pub delta0: Option<f64>,
    pub v0: Option<f64>,
    pub rho: Option<f64>,
    /// Forces `V₂` on the four-atom diagonal pairs.
    pub v2_override: Option<f64>,
    pub listed_couplings_only: Option<bool>,
    pub blockade_ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimesSpec {
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrotterSpec {
    pub dt: Option<f64>,
    pub shots: Option<u64>,
}

/// One experiment. Every field is optional so presets, files and flags can
/// be layered; [`ExperimentConfig::merge`] lets the later layer win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub preset: Option<String>,
    pub system: Option<SystemKind>,
    pub target: TargetSpec,
    pub simulator: SimulatorSpec,
    pub times: TimesSpec,
    /// Simulator time is target time divided by `k`.
    pub k: Option<f64>,
    /// Initial spin number for one-spin systems.
    pub initial_m: Option<i32>,
    pub trotter: TrotterSpec,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Fields set in `top` replace those in `self`.
    pub fn merge(mut self, top: &ExperimentConfig) -> Self {
        overlay!(self, top; mode, preset, system, k, initial_m, seed, out);
        overlay!(self.target, top.target; u, x, y, n_sites, m_max, periodic);
        overlay!(self.simulator, top.simulator;
            omega, delta, delta0, v0, rho, v2_override, listed_couplings_only, blockade_ratio);
        overlay!(self.times, top.times; start, end, points);
        overlay!(self.trotter, top.trotter; dt, shots);
        self
    }
}

/// Reads a required field or names it in the error.
pub fn need<T: Copy>(v: Option<T>, field: &str, mode: Mode) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(field, format!("required for mode {}", mode.name())))
}
