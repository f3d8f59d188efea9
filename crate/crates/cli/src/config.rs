//! JSON run configuration. Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Deserialize;

use qfc_core::comb::{BiphotonAmplitude, GaussianForm, GaussianWeights, ModeConvention, PhaseMask, WeightSpec};
use qfc_core::walk::{EnergyScale, WalkTemplate, DEFAULT_PHI_RF, DEPTH_COUPLING};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub state: Option<StateConfig>,
    pub mask: Option<MaskConfig>,
    pub walk: Option<WalkConfig>,
    pub tomo: Option<TomoConfig>,
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    /// Total mode count N (odd).
    pub modes: usize,
    #[serde(default)]
    pub include_degenerate: bool,
    pub weights: WeightsConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum WeightsConfig {
    /// `[q, [re, im]]` pairs.
    Explicit(Vec<(i32, [f64; 2])>),
    Gaussian(GaussianConfig),
    /// `D` equal weights.
    Equal(u32),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    #[serde(default = "one")]
    pub a0: f64,
    #[serde(default)]
    pub mu: f64,
    pub sigma: f64,
    pub p: u32,
    #[serde(default)]
    pub convention: Convention,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Squared,
    Envelope,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum MaskConfig {
    /// Parity pattern shared by both arms.
    Pattern { odd: f64, even: f64 },
    /// `[mode, phase]` pairs on the lattice, shared by both arms.
    Explicit(Vec<(i32, f64)>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    /// Depth for the `walk` command.
    pub delta: Option<f64>,
    /// Depth grid for the `sweep` command.
    pub delta_grid: Option<Vec<f64>>,
    #[serde(default = "default_phi_rf")]
    pub phi_rf: f64,
    pub guard: Option<usize>,
    /// RF phase samples for the desynchronised average.
    #[serde(default = "default_desync_grid")]
    pub desync_grid: usize,
    pub energy_scale: Option<EnergyScaleConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyScaleConfig {
    #[serde(default)]
    pub omega_ceo: f64,
    pub omega_fsr: f64,
    pub g1: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoConfig {
    pub dim: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub noise: NoiseKind,
    pub seed: Option<u64>,
    pub fsr_label: Option<String>,
    pub target: Option<TargetConfig>,
    /// Count file read by `tomo-fit`.
    pub counts: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    Exact,
    Poisson,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    /// Upper anti-diagonal line weights `[re, im]`; when absent the `state`
    /// section is post-selected onto the tomography window.
    pub upper: Option<Vec<[f64; 2]>>,
    #[serde(default = "one")]
    pub depolarize: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Pgm,
}

fn one() -> f64 {
    1.0
}

fn default_phi_rf() -> f64 {
    DEFAULT_PHI_RF
}

fn default_desync_grid() -> usize {
    360
}

fn default_scale() -> f64 {
    1e5
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn state(&self) -> Result<&StateConfig, CliError> {
        self.state.as_ref().ok_or_else(|| CliError::Config("missing `state` section".into()))
    }

    pub fn walk(&self) -> Result<&WalkConfig, CliError> {
        self.walk.as_ref().ok_or_else(|| CliError::Config("missing `walk` section".into()))
    }

    pub fn tomo(&self) -> Result<&TomoConfig, CliError> {
        self.tomo.as_ref().ok_or_else(|| CliError::Config("missing `tomo` section".into()))
    }

    /// Shared mask for both arms; no mask means zero phases.
    pub fn mask(&self) -> PhaseMask {
        match &self.mask {
            None => PhaseMask::uniform(0.0),
            Some(MaskConfig::Pattern { odd, even }) => PhaseMask::Alternating { odd: *odd, even: *even },
            Some(MaskConfig::Explicit(pairs)) => PhaseMask::Explicit(pairs.iter().copied().collect()),
        }
    }
}

impl StateConfig {
    pub fn convention(&self) -> Result<ModeConvention, CliError> {
        Ok(ModeConvention::new(self.modes, self.include_degenerate)?)
    }

    pub fn weight_spec(&self) -> Result<WeightSpec, CliError> {
        Ok(match &self.weights {
            WeightsConfig::Explicit(pairs) => {
                WeightSpec::explicit(pairs.iter().map(|&(q, [re, im])| (q, C64::new(re, im))))
            }
            WeightsConfig::Equal(d) => WeightSpec::equal(*d)?,
            WeightsConfig::Gaussian(g) => WeightSpec::Gaussian(GaussianWeights {
                amplitude: g.a0,
                center: g.mu,
                width: g.sigma,
                max_order: g.p,
                form: match g.convention {
                    Convention::Squared => GaussianForm::Squared,
                    Convention::Envelope => GaussianForm::Envelope,
                },
            }),
        })
    }

    pub fn synthesize(&self) -> Result<BiphotonAmplitude, CliError> {
        Ok(qfc_core::comb::synthesize(&self.convention()?, &self.weight_spec()?)?)
    }
}

impl WalkConfig {
    pub fn template(&self) -> WalkTemplate {
        WalkTemplate { phi_rf: self.phi_rf, guard: self.guard }
    }

    pub fn energy_scale(&self) -> Result<EnergyScale, CliError> {
        Ok(match &self.energy_scale {
            Some(s) => EnergyScale::new(s.omega_ceo, s.omega_fsr, s.g1, self.phi_rf)?,
            None => EnergyScale::new(0.0, 1.0, DEPTH_COUPLING, self.phi_rf)?,
        })
    }
}

impl TargetConfig {
    pub fn upper_weights(&self) -> Option<Vec<C64>> {
        self.upper.as_ref().map(|u| u.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}
