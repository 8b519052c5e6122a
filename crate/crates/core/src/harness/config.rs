use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::noise::{DdSequence, Fidelity, NoiseModel, PulseParams, Reporting};

/// Flagged mass ε for k = 1..7 with an even split between |00⟩ and |01⟩.
pub const DEFAULT_EPSILONS: [f64; 7] = [0.2742, 0.0987, 0.0504, 0.0305, 0.0204, 0.0146, 0.0110];

pub const DEFAULT_DETUNINGS: [f64; 4] = [0.0, -0.015, -0.04, -0.08];

/// (k, a₀₀, a₀₁) input distributions spanning rᵢ between 0 and 2.
pub const DEFAULT_RATIO_ROWS: [(u32, f64, f64); 13] = [
    (1, 0.00271, 0.27144),
    (1, 0.07257, 0.20159),
    (1, 0.11383, 0.16032),
    (1, 0.14107, 0.13309),
    (1, 0.16040, 0.11376),
    (1, 0.17482, 0.09933),
    (1, 0.13708, 0.13708),
    (3, 0.00458, 0.04578),
    (3, 0.01633, 0.03402),
    (3, 0.02328, 0.02707),
    (3, 0.02788, 0.02248),
    (3, 0.03114, 0.01922),
    (3, 0.03357, 0.01679),
];

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioRow {
    pub k: u32,
    pub a00: f64,
    pub a01: f64,
}

/// Source of the b columns. `auto` reports exact probabilities when every
/// noise channel is off and sampled frequencies otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportMode {
    #[default]
    Auto,
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub seed: u64,
    pub shots: u64,
    pub epsilons: Vec<f64>,
    pub ratio_rows: Vec<RatioRow>,
    pub detunings: Vec<f64>,
    /// Deliberations per ε for the classical baseline.
    pub classical_runs: u64,
    pub weighted_fit: bool,
    pub report: ReportMode,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            seed: 1,
            shots: 1600,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            ratio_rows: DEFAULT_RATIO_ROWS.iter().map(|&(k, a00, a01)| RatioRow { k, a00, a01 }).collect(),
            detunings: DEFAULT_DETUNINGS.to_vec(),
            classical_runs: 10_000,
            weighted_fit: false,
            report: ReportMode::Auto,
        }
    }
}

/// Pulse parameters in laboratory units.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub rabi_hz: f64,
    pub tau_s: f64,
    pub coupling_hz: f64,
    pub dd_sets: u32,
    pub fidelity: Fidelity,
}

impl Default for PulseSection {
    fn default() -> Self {
        let p = PulseParams::default();
        PulseSection {
            rabi_hz: p.rabi / (2.0 * PI),
            tau_s: p.tau,
            coupling_hz: p.coupling / (2.0 * PI),
            dd_sets: p.dd_sets,
            fidelity: Fidelity::Gate,
        }
    }
}

impl PulseSection {
    pub fn params(&self) -> PulseParams {
        PulseParams {
            rabi: 2.0 * PI * self.rabi_hz,
            tau: self.tau_s,
            coupling: 2.0 * PI * self.coupling_hz,
            dd_sets: self.dd_sets,
            sequence: DdSequence::Ur14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub experiment: ExperimentSection,
    pub noise: NoiseModel,
    pub pulses: PulseSection,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        let ex = &self.experiment;
        if ex.shots == 0 {
            return cfg("experiment.shots must be at least 1".into());
        }
        if ex.classical_runs == 0 {
            return cfg("experiment.classical_runs must be at least 1".into());
        }
        if let Some(e) = ex.epsilons.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return cfg(format!("experiment.epsilons: {e} is outside (0, 1]"));
        }
        for (i, row) in ex.ratio_rows.iter().enumerate() {
            if !(row.a00 >= 0.0 && row.a01 >= 0.0 && row.a00 + row.a01 <= 1.0 + 1e-12) {
                return cfg(format!("experiment.ratio_rows[{i}]: a00, a01 must be probabilities"));
            }
        }
        if let Some(d) = ex.detunings.iter().find(|d| !(d.abs() < 1.0)) {
            return cfg(format!("experiment.detunings: {d} must satisfy |δr| < 1"));
        }
        self.noise.validate().map_err(|e| Error::Config(format!("[noise] {e}")))?;
        self.pulses.params().validate().map_err(|e| Error::Config(format!("[pulses] {e}")))?;
        Ok(())
    }

    pub fn params(&self) -> PulseParams {
        self.pulses.params()
    }

    pub fn reporting(&self) -> Reporting {
        match self.experiment.report {
            ReportMode::Exact => Reporting::Exact,
            ReportMode::Sampled => Reporting::Sampled,
            ReportMode::Auto if self.noise.is_ideal() => Reporting::Exact,
            ReportMode::Auto => Reporting::Sampled,
        }
    }
}
