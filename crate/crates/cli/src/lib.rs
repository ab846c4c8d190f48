//! Scenario-driven front end for the explicate-core library.

pub mod config;
pub mod report;
pub mod scenario;

pub use config::{ConfigError, ScenarioConfig, ScenarioKind};
pub use report::{CheckResult, RunReport};
pub use scenario::{catalogue, run_scenario, RunError, RunOptions};
