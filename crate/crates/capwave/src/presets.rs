//! Built-in configurations reproducing the published figures.
//!
//! All share `ε = √μ = T = 0.1`, `α = 1.2` and the `L = 256`, `N = 4096`
//! window. Snapshot times and wavenumber ranges are not published;
//! the defaults of [`EvolveConfig`](crate::config::EvolveConfig) and
//! [`DispersionConfig`](crate::config::DispersionConfig) apply.

use crate::config::{Command, ExperimentConfig, ModelName, SweepConfig};

pub const NAMES: &[&str] = &[
    "fig1", "fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5", "fig7", "fig8", "fig9", "fig10",
];

const ALL_MODELS: [ModelName; 3] = [ModelName::System, ModelName::Rbenjamin, ModelName::Benjamin];

fn base(command: Command, models: &[ModelName], gamma: f64, speed: f64) -> ExperimentConfig {
    ExperimentConfig {
        command: Some(command),
        models: models.to_vec(),
        gamma,
        speed,
        ..ExperimentConfig::default()
    }
}

pub fn get(name: &str) -> Option<ExperimentConfig> {
    use Command::*;
    Some(match name {
        "fig1" => base(Solve, &[ModelName::System], 0.8, 0.49),
        "fig2" => base(Solve, &[ModelName::System], 0.8, -0.49),
        "fig3a" => base(Solve, &ALL_MODELS, 0.4, 1.1),
        "fig3b" => base(Solve, &ALL_MODELS, 0.6, 0.75),
        // the phase portraits come with every solve
        "fig3c" | "fig4" => base(Solve, &ALL_MODELS, 0.8, 0.49),
        "fig5" => ExperimentConfig {
            sweep: SweepConfig {
                gammas: vec![0.4, 0.6, 0.8],
                ..SweepConfig::default()
            },
            ..base(Sweep, &ALL_MODELS, 0.6, 0.75)
        },
        "fig7" => base(Evolve, &[ModelName::Rbenjamin], 0.4, 1.1),
        "fig8" => base(Evolve, &[ModelName::System], 0.4, 1.1),
        "fig9" => base(Dispersion, &[ModelName::Rbenjamin], 0.4, 1.1),
        "fig10" => base(Dispersion, &[ModelName::System], 0.4, 1.1),
        _ => return None,
    })
}
