use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use pfluid::fespace::ElementPair;
use pfluid::stepper::SolverOptions;
use pfluid::verification::{GronwallData, TauChoice, TimeProfile};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Study,
    Properties,
    GronwallCheck,
    BochnerCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub p: f64,
    pub delta: f64,
}

/// Mesh and time grid. `n` and `M` drive `simulate`; `levels` and `sigma`
/// drive `study` and harvested Gronwall checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    #[serde(default)]
    pub element: ElementPair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "default_sigma0")]
    pub sigma0: f64,
    #[serde(default = "default_true")]
    pub parallel: bool,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            element: ElementPair::Mini,
            n: None,
            levels: None,
            t_final: None,
            steps: None,
            sigma: None,
            sigma0: default_sigma0(),
            parallel: true,
        }
    }
}

fn default_sigma0() -> f64 {
    2.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    /// The right-hand side that makes the manufactured solution exact.
    #[default]
    Manufactured,
    /// `f = 0`, starting from the manufactured initial velocity.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropertiesConfig {
    pub samples: usize,
    pub range: f64,
    pub quasi_norm_samples: usize,
    pub quasi_norm_levels: Vec<usize>,
}

impl Default for PropertiesConfig {
    fn default() -> Self {
        PropertiesConfig { samples: 10_000, range: 10.0, quasi_norm_samples: 200, quasi_norm_levels: vec![8, 16] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BochnerFamily {
    Constant,
    Linear,
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BochnerConfig {
    pub families: Vec<BochnerFamily>,
    pub tau: TauChoice,
    pub steps: Vec<usize>,
}

impl Default for BochnerConfig {
    fn default() -> Self {
        BochnerConfig {
            families: vec![BochnerFamily::Constant, BochnerFamily::Linear, BochnerFamily::Sine],
            tau: TauChoice::Right,
            steps: vec![4, 8, 16],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub manufactured: TimeProfile,
    #[serde(default)]
    pub forcing: ForcingKind,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub properties: PropertiesConfig,
    #[serde(default)]
    pub bochner: BochnerConfig,
    /// Explicit sequences for `gronwall-check`; without them the data is
    /// harvested from a study run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gronwall: Option<GronwallData>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Parses and validates a JSON run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text)
        .map_err(|e| ConfigError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if let Some(m) = &self.model {
            if !(m.p > 1.0 && m.p <= 2.0) {
                return bad(format!("p must lie in (1,2], got {}", m.p));
            }
            if !(m.delta >= 0.0 && m.delta.is_finite()) {
                return bad(format!("delta must be nonnegative, got {}", m.delta));
            }
        }
        let d = &self.discretization;
        if let Some(t) = d.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("T must be positive, got {t}"));
            }
        }
        if d.steps == Some(0) {
            return bad("M must be at least 1".into());
        }
        if d.n == Some(0) {
            return bad("n must be at least 1".into());
        }
        if let Some(levels) = &d.levels {
            if levels.is_empty() || levels.contains(&0) {
                return bad("levels must be a nonempty list of positive subdivisions".into());
            }
        }
        if let Some(s) = d.sigma {
            if !(s > 0.0) {
                return bad(format!("sigma must be positive, got {s}"));
            }
        }
        if !(d.sigma0 > 0.0) {
            return bad(format!("sigma0 must be positive, got {}", d.sigma0));
        }
        let need_model = || match self.model {
            Some(_) => Ok(()),
            None => bad("model {p, delta} is required for this command".into()),
        };
        let need_t = || match d.t_final {
            Some(_) => Ok(()),
            None => bad("discretization.T (final time) is required for this command".into()),
        };
        match self.command {
            Command::Simulate => {
                need_model()?;
                need_t()?;
                if d.n.is_none() {
                    return bad("discretization.n is required for simulate".into());
                }
                if d.steps.is_none() && d.sigma.is_none() {
                    return bad("simulate needs discretization.M or discretization.sigma".into());
                }
            }
            Command::Study => {
                need_model()?;
                need_t()?;
                if d.levels.is_none() {
                    return bad("discretization.levels is required for study".into());
                }
            }
            Command::GronwallCheck => {
                if self.gronwall.is_none() {
                    need_model()?;
                    need_t()?;
                    if d.levels.is_none() {
                        return bad("gronwall-check needs explicit gronwall data or discretization.levels".into());
                    }
                }
            }
            Command::BochnerCheck => {
                need_t()?;
                if self.bochner.steps.is_empty() || self.bochner.steps.contains(&0) {
                    return bad("bochner.steps must be a nonempty list of positive step counts".into());
                }
            }
            Command::Properties => {
                if self.properties.samples == 0 || !(self.properties.range > 0.0) {
                    return bad("properties.samples and properties.range must be positive".into());
                }
            }
        }
        Ok(())
    }

    /// `sigma`, defaulting to `1/4`.
    pub fn sigma(&self) -> f64 {
        self.discretization.sigma.unwrap_or(0.25)
    }
}
