//! JSON run configuration: schema, defaults, and conversion into the core
//! domain types.
//!
//! The file is strict: unknown keys are rejected so a typo fails loudly
//! instead of silently running with defaults. Paths named in the config
//! (circuit file, input state dump) resolve relative to the config file's
//! directory, so a config and its circuit can travel together.

use std::path::{Path, PathBuf};

use modvar::{Backend, EnvelopeFamily, GridSpec, WeightFamily};
use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub envelope: EnvelopeConfig,
    pub weight: WeightConfig,
    pub backend: BackendChoice,
    /// Circuit file path; omitted means an empty circuit (pass-through).
    #[serde(default)]
    pub circuit: Option<String>,
    /// Logical input angles; omitted means |0̄⟩ on every mode.
    #[serde(default)]
    pub input: Option<InputConfig>,
    /// A state dump to load instead of encoding `input`.
    #[serde(default)]
    pub input_state: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Hard ceiling on |total probability − 1| before the run aborts.
    #[serde(default)]
    pub self_check_tolerance: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub outputs: Option<OutputNames>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub samples_per_period: usize,
    pub period_count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvelopeConfig {
    Uniform,
    Gaussian {
        #[serde(default)]
        theta_center: Option<f64>,
        #[serde(default)]
        theta_width: Option<f64>,
        #[serde(default)]
        k_center: Option<f64>,
        #[serde(default)]
        k_width: Option<f64>,
    },
    SingleFiber {
        s: usize,
        m: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    Constant { value: f64 },
    CosTheta,
    SinTheta,
    CosPiK,
    CosThetaMinusPiK,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendChoice {
    Exact,
    Ancilla,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub chi: f64,
    pub phi: f64,
    /// Second-mode angles for two-qubit circuits; default to (chi, phi).
    #[serde(default)]
    pub chi_b: Option<f64>,
    #[serde(default)]
    pub phi_b: Option<f64>,
}

/// Envelope-width ladder: each width replaces the Gaussian θ̄ width and the
/// circuit is re-run through both backends.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub theta_widths: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputNames {
    #[serde(default)]
    pub metrics: Option<String>,
    #[serde(default)]
    pub state_prefix: Option<String>,
    #[serde(default)]
    pub sweep: Option<String>,
}

/// A parsed config together with the directory its relative paths resolve
/// against.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub raw: RunConfig,
    pub dir: PathBuf,
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> CliResult<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let raw: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
    Ok(LoadedConfig {
        raw,
        dir: path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf(),
    })
}

fn gaussian_defaults() -> (f64, f64, f64, f64) {
    match EnvelopeFamily::default_gaussian() {
        EnvelopeFamily::Gaussian {
            theta_center,
            theta_width,
            k_center,
            k_width,
        } => (theta_center, theta_width, k_center, k_width),
        _ => unreachable!("default envelope is gaussian"),
    }
}

impl LoadedConfig {
    pub fn grid(&self) -> CliResult<GridSpec> {
        Ok(GridSpec::new(
            self.raw.grid.samples_per_period,
            self.raw.grid.period_count,
        )?)
    }

    pub fn envelope_family(&self) -> EnvelopeFamily {
        match &self.raw.envelope {
            EnvelopeConfig::Uniform => EnvelopeFamily::Uniform,
            EnvelopeConfig::SingleFiber { s, m } => EnvelopeFamily::SingleFiber { s: *s, m: *m },
            EnvelopeConfig::Gaussian {
                theta_center,
                theta_width,
                k_center,
                k_width,
            } => {
                let (dc, dw, dkc, dkw) = gaussian_defaults();
                EnvelopeFamily::Gaussian {
                    theta_center: theta_center.unwrap_or(dc),
                    theta_width: theta_width.unwrap_or(dw),
                    k_center: k_center.unwrap_or(dkc),
                    k_width: k_width.unwrap_or(dkw),
                }
            }
        }
    }

    /// The configured envelope with its θ̄ width replaced, for sweeps.
    pub fn envelope_family_with_width(&self, width: f64) -> CliResult<EnvelopeFamily> {
        match self.envelope_family() {
            EnvelopeFamily::Gaussian {
                theta_center,
                k_center,
                k_width,
                ..
            } => Ok(EnvelopeFamily::Gaussian {
                theta_center,
                theta_width: width,
                k_center,
                k_width,
            }),
            _ => Err(CliError::Config(
                "sweep requires a gaussian envelope".to_string(),
            )),
        }
    }

    pub fn weight_family(&self) -> WeightFamily {
        match &self.raw.weight {
            WeightConfig::Constant { value } => WeightFamily::Constant(*value),
            WeightConfig::CosTheta => WeightFamily::CosTheta,
            WeightConfig::SinTheta => WeightFamily::SinTheta,
            WeightConfig::CosPiK => WeightFamily::CosPiK,
            WeightConfig::CosThetaMinusPiK => WeightFamily::CosThetaMinusPiK,
        }
    }

    pub fn backend(&self) -> Backend {
        match self.raw.backend {
            BackendChoice::Exact => Backend::Exact,
            BackendChoice::Ancilla => Backend::Ancilla,
        }
    }

    pub fn backend_name(&self) -> &'static str {
        match self.raw.backend {
            BackendChoice::Exact => "exact",
            BackendChoice::Ancilla => "ancilla",
        }
    }

    pub fn circuit_path(&self) -> Option<PathBuf> {
        self.raw.circuit.as_ref().map(|p| self.dir.join(p))
    }

    pub fn input_state_path(&self) -> Option<PathBuf> {
        self.raw.input_state.as_ref().map(|p| self.dir.join(p))
    }

    /// Effective seed: command-line flag, then config, then 0.
    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.raw.seed).unwrap_or(0)
    }

    pub fn tolerance(&self) -> f64 {
        self.raw.self_check_tolerance.unwrap_or(1e-6)
    }

    pub fn metrics_name(&self) -> &str {
        self.raw
            .outputs
            .as_ref()
            .and_then(|o| o.metrics.as_deref())
            .unwrap_or("metrics.json")
    }

    pub fn state_prefix(&self) -> &str {
        self.raw
            .outputs
            .as_ref()
            .and_then(|o| o.state_prefix.as_deref())
            .unwrap_or("state")
    }

    pub fn sweep_name(&self) -> &str {
        self.raw
            .outputs
            .as_ref()
            .and_then(|o| o.sweep.as_deref())
            .unwrap_or("sweep.csv")
    }
}
