//! Experiment configuration: one JSON document per run, layered over an
//! optional built-in preset.

use std::fmt;
use std::path::Path;

use capwave_core::evolution::TimeGrid;
use capwave_core::solitary::{PetviashviliConfig, TensionConvention};
use capwave_core::{GridSpec, ModelKind, ModelParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Evolve,
    Sweep,
    Dispersion,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Solve => "solve",
            Command::Evolve => "evolve",
            Command::Sweep => "sweep",
            Command::Dispersion => "dispersion",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Benjamin,
    Rbenjamin,
    System,
}

impl ModelName {
    pub fn kind(self) -> ModelKind {
        match self {
            ModelName::Benjamin => ModelKind::Benjamin,
            ModelName::Rbenjamin => ModelKind::RBenjamin,
            ModelName::System => ModelKind::BenjaminSystem,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tension {
    Reduced,
    Bare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub extrapolation_width: usize,
    pub tension: Tension,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = PetviashviliConfig::default();
        SolverConfig {
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            extrapolation_width: d.extrapolation_width,
            tension: Tension::Reduced,
        }
    }
}

impl SolverConfig {
    pub fn petviashvili(&self) -> PetviashviliConfig {
        PetviashviliConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            extrapolation_width: self.extrapolation_width,
            initial_guess: None,
            tension: match self.tension {
                Tension::Reduced => TensionConvention::Reduced,
                Tension::Bare => TensionConvention::Bare,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub gammas: Vec<f64>,
    /// Speeds as multiples of `c_gamma`.
    pub speed_fractions: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            gammas: vec![0.6],
            speed_fractions: vec![0.94, 0.92, 0.90, 0.88, 0.86, 0.84, 0.82, 0.80],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    /// Model whose solitary wave is the initial condition.
    pub source: ModelName,
    pub t_end: f64,
    pub dt: f64,
    /// Defaults to a quarter of the steps, giving four snapshots after `t = 0`.
    pub snapshot_stride: Option<usize>,
    /// Defaults to five half-height widths of the initial pulse.
    pub pulse_halfwidth: Option<f64>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            source: ModelName::Benjamin,
            t_end: 50.0,
            dt: 0.01,
            snapshot_stride: None,
            pulse_halfwidth: None,
        }
    }
}

impl EvolveConfig {
    pub fn time_grid(&self) -> Result<TimeGrid, CliError> {
        let steps = if self.dt > 0.0 && self.t_end > 0.0 {
            (self.t_end / self.dt).round() as usize
        } else {
            0
        };
        let stride = self.snapshot_stride.unwrap_or((steps / 4).max(1));
        TimeGrid::new(self.t_end, self.dt, stride).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub k_max: f64,
    pub k_points: usize,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig {
            k_max: 5.0,
            k_points: 501,
        }
    }
}

impl DispersionConfig {
    pub fn wavenumbers(&self) -> Vec<f64> {
        if self.k_points == 1 {
            return vec![0.0];
        }
        let n = self.k_points - 1;
        (0..=n).map(|j| self.k_max * j as f64 / n as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Set by presets; must match the subcommand when present.
    pub command: Option<Command>,
    pub models: Vec<ModelName>,
    pub epsilon: f64,
    pub mu_sqrt: f64,
    pub gamma: f64,
    pub tension: f64,
    pub alpha: f64,
    pub half_length: f64,
    pub modes: usize,
    pub dealias: bool,
    /// Traveling-wave speed; for `dispersion`, the frame speed.
    pub speed: f64,
    pub solver: SolverConfig,
    pub sweep: SweepConfig,
    pub evolve: EvolveConfig,
    pub dispersion: DispersionConfig,
    /// Recorded in the manifest; no command currently draws random numbers.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: None,
            models: vec![ModelName::Rbenjamin],
            epsilon: 0.1,
            mu_sqrt: 0.1,
            gamma: 0.6,
            tension: 0.1,
            alpha: 1.2,
            half_length: 256.0,
            modes: 4096,
            dealias: false,
            speed: 0.75,
            solver: SolverConfig::default(),
            sweep: SweepConfig::default(),
            evolve: EvolveConfig::default(),
            dispersion: DispersionConfig::default(),
            seed: 0,
        }
    }
}

/// Recursively overlays `patch` onto `base`; objects merge key by key,
/// anything else replaces.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, p) => *slot = p,
    }
}

impl ExperimentConfig {
    /// Preset (or defaults) overlaid with the JSON document at `path`.
    pub fn resolve(preset: Option<&str>, path: Option<&Path>) -> Result<Self, CliError> {
        let base = match preset {
            Some(name) => presets::get(name).ok_or_else(|| {
                CliError::Config(format!("unknown preset `{name}` (known: {})", presets::NAMES.join(", ")))
            })?,
            None => ExperimentConfig::default(),
        };
        let mut value = serde_json::to_value(&base)?;
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let patch: Value = serde_json::from_str(&text)?;
            if !patch.is_object() {
                return Err(CliError::Config("configuration must be a JSON object".into()));
            }
            merge(&mut value, patch);
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        self.params_at(self.gamma)
    }

    pub fn params_at(&self, gamma: f64) -> Result<ModelParams, CliError> {
        ModelParams::new(self.epsilon, self.mu_sqrt, gamma, self.tension, self.alpha)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        GridSpec::new(self.half_length, self.modes)
            .map(|g| g.with_dealiasing(self.dealias))
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks everything `cmd` will use before any output is produced.
    pub fn validate(&self, cmd: Command) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(c) = self.command {
            if c != cmd {
                return bad(format!("configuration is for `{c}`, not `{cmd}`"));
            }
        }
        if self.models.is_empty() {
            return bad("`models` must not be empty".into());
        }
        if !self.speed.is_finite() {
            return bad("`speed` must be finite".into());
        }
        self.params()?;
        match cmd {
            Command::Solve | Command::Evolve | Command::Sweep => {
                self.grid()?;
                self.solver
                    .petviashvili()
                    .validate()
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            Command::Dispersion => {}
        }
        match cmd {
            Command::Evolve => {
                self.evolve.time_grid()?;
                if let Some(h) = self.evolve.pulse_halfwidth {
                    if !(h > 0.0 && h.is_finite()) {
                        return bad("`evolve.pulse_halfwidth` must be positive".into());
                    }
                }
            }
            Command::Sweep => {
                if self.sweep.gammas.is_empty() || self.sweep.speed_fractions.is_empty() {
                    return bad("`sweep.gammas` and `sweep.speed_fractions` must not be empty".into());
                }
                for &g in &self.sweep.gammas {
                    self.params_at(g)?;
                }
                if self.sweep.speed_fractions.iter().any(|f| !f.is_finite()) {
                    return bad("`sweep.speed_fractions` must be finite".into());
                }
            }
            Command::Dispersion => {
                if self.dispersion.k_points == 0 || !(self.dispersion.k_max >= 0.0 && self.dispersion.k_max.is_finite()) {
                    return bad("`dispersion` needs k_points ≥ 1 and a finite k_max ≥ 0".into());
                }
            }
            Command::Solve => {}
        }
        Ok(())
    }
}
