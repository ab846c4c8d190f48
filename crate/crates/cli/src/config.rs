//! Scenario configuration: a single versioned JSON document.  Unknown keys
//! are hard errors, not warnings; a silent typo in a tolerance would mask
//! regressions.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid field `{field}`: {message}")]
    Field { field: &'static str, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    GroundState,
    Coherent,
    FreePacket,
    Cubic,
    TwoSlitPreset,
    LatticeDemo,
    FilterDemo,
    SpinorDemo,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::GroundState,
        ScenarioKind::Coherent,
        ScenarioKind::FreePacket,
        ScenarioKind::Cubic,
        ScenarioKind::TwoSlitPreset,
        ScenarioKind::LatticeDemo,
        ScenarioKind::FilterDemo,
        ScenarioKind::SpinorDemo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::GroundState => "ground_state",
            ScenarioKind::Coherent => "coherent",
            ScenarioKind::FreePacket => "free_packet",
            ScenarioKind::Cubic => "cubic",
            ScenarioKind::TwoSlitPreset => "two_slit_preset",
            ScenarioKind::LatticeDemo => "lattice_demo",
            ScenarioKind::FilterDemo => "filter_demo",
            ScenarioKind::SpinorDemo => "spinor_demo",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            ScenarioKind::GroundState => {
                "stationary oscillator state: quantum-potential balance, projected-equation \
                 residuals in both representations"
            }
            ScenarioKind::Coherent => {
                "oscillating coherent packet: equation-pair residuals, projection closure, \
                 rigid Bohm trajectories, ensemble equivariance"
            }
            ScenarioKind::FreePacket => {
                "free Gaussian spreading: analytic width law and continuity-residual convergence"
            }
            ScenarioKind::Cubic => {
                "anharmonic (cubic) potential, short time: energy conservation, continuity \
                 convergence, local-momentum fields in both representations"
            }
            ScenarioKind::TwoSlitPreset => {
                "two-packet interference under free flight: lane-forming, non-crossing \
                 trajectories (qualitative preset)"
            }
            ScenarioKind::LatticeDemo => {
                "projection lattice: orthomodularity sweep, Boolean blocks, distributivity \
                 counterexample"
            }
            ScenarioKind::FilterDemo => {
                "sequential spin filters with the Lüders update: the half-the-objects-change \
                 chain"
            }
            ScenarioKind::SpinorDemo => {
                "algebraic spinors: column dictionary round-trip, density-element purity, \
                 polar decomposition"
            }
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    pub half_width: f64,
    /// Use the self-dual spacing `dx = sqrt(2 pi / N)` (half_width ignored).
    #[serde(default)]
    pub self_dual: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum PotentialConfig {
    Free,
    Harmonic { stiffness: f64 },
    Cubic { stiffness: f64, cubic: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub mass: f64,
    pub potential: PotentialConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub momentum: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub dt_out: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoriesConfig {
    /// Ensemble size (quantile-spaced over the initial density).
    pub count: usize,
    /// Extra individually-reported starting points.
    #[serde(default)]
    pub points: Vec<f64>,
}

/// One scenario run: kind plus optional overrides of the scenario's
/// defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub hamiltonian: Option<HamiltonianConfig>,
    #[serde(default)]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub time: Option<TimeConfig>,
    #[serde(default)]
    pub trajectories: Option<TrajectoriesConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Per-check tolerance overrides, keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let body = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: ScenarioConfig =
            serde_json::from_str(&body).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(ConfigError::Field {
                field: "version",
                message: format!("expected {CONFIG_VERSION}, got {}", self.version),
            });
        }
        if let Some(grid) = &self.grid {
            if !grid.points.is_power_of_two() {
                return Err(ConfigError::Field {
                    field: "grid.points",
                    message: format!("{} is not a power of two", grid.points),
                });
            }
            if !grid.self_dual && !(grid.half_width > 0.0 && grid.half_width.is_finite()) {
                return Err(ConfigError::Field {
                    field: "grid.half_width",
                    message: format!("must be positive and finite, got {}", grid.half_width),
                });
            }
        }
        if let Some(h) = &self.hamiltonian {
            if !(h.mass > 0.0 && h.mass.is_finite()) {
                return Err(ConfigError::Field {
                    field: "hamiltonian.mass",
                    message: format!("must be positive and finite, got {}", h.mass),
                });
            }
        }
        if let Some(initial) = &self.initial {
            if !(initial.width > 0.0 && initial.width.is_finite()) {
                return Err(ConfigError::Field {
                    field: "initial.width",
                    message: format!("must be positive and finite, got {}", initial.width),
                });
            }
        }
        if let Some(time) = &self.time {
            if !(time.dt > 0.0 && time.dt.is_finite()) {
                return Err(ConfigError::Field {
                    field: "time.dt",
                    message: format!("must be positive and finite, got {}", time.dt),
                });
            }
            if time.dt >= time.dt_out {
                return Err(ConfigError::Field {
                    field: "time.dt",
                    message: format!(
                        "dt = {} must be smaller than dt_out = {}",
                        time.dt, time.dt_out
                    ),
                });
            }
            if time.duration < time.dt_out {
                return Err(ConfigError::Field {
                    field: "time.duration",
                    message: format!(
                        "duration = {} must cover at least one output interval {}",
                        time.duration, time.dt_out
                    ),
                });
            }
        }
        if let Some(tr) = &self.trajectories {
            if tr.count > 0 && tr.count < 100 {
                return Err(ConfigError::Field {
                    field: "trajectories.count",
                    message: format!("ensemble needs at least 100 trajectories, got {}", tr.count),
                });
            }
        }
        for (name, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(ConfigError::Field {
                    field: "tolerances",
                    message: format!("tolerance `{name}` must be a finite non-negative number"),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(body: &str) -> Result<ScenarioConfig, ConfigError> {
        let config: ScenarioConfig =
            serde_json::from_str(body).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    #[test]
    fn minimal_config_parses() {
        let cfg = parse(r#"{"version": 1, "scenario": "ground_state"}"#).unwrap();
        assert_eq!(cfg.scenario, ScenarioKind::GroundState);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = parse(r#"{"version": 1, "scenario": "coherent", "dt": 0.1}"#).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("dt"), "{message}");
    }

    #[test]
    fn unknown_scenario_lists_valid_kinds() {
        let err = parse(r#"{"version": 1, "scenario": "warp_drive"}"#).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("ground_state") || message.contains("expected one of"));
    }

    #[test]
    fn dt_ordering_is_validated() {
        let err = parse(
            r#"{"version": 1, "scenario": "coherent",
                "time": {"dt": 0.1, "dt_out": 0.01, "duration": 1.0}}"#,
        )
        .unwrap_err();
        match err {
            ConfigError::Field { field, .. } => assert_eq!(field, "time.dt"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn grid_power_of_two_is_validated() {
        let err = parse(
            r#"{"version": 1, "scenario": "coherent",
                "grid": {"points": 1000, "half_width": 12.0}}"#,
        )
        .unwrap_err();
        match err {
            ConfigError::Field { field, .. } => assert_eq!(field, "grid.points"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn version_is_checked() {
        let err = parse(r#"{"version": 2, "scenario": "coherent"}"#).unwrap_err();
        match err {
            ConfigError::Field { field, .. } => assert_eq!(field, "version"),
            other => panic!("unexpected error {other}"),
        }
    }
}
