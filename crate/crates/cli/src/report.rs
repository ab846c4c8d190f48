//! Run reports: one named check per verified quantity, a uniform
//! "value <= tolerance" pass rule, and a JSON rendering.

use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Measured defect; smaller is better.
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
    pub runtime_seconds: f64,
    pub artifacts: Vec<String>,
    pub pass: bool,
}

impl RunReport {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            checks: Vec::new(),
            warnings: Vec::new(),
            runtime_seconds: 0.0,
            artifacts: Vec::new(),
            pass: true,
        }
    }

    /// Records a check; the run passes only if every check passes.
    pub fn check(&mut self, name: &str, value: f64, tolerance: f64) {
        let pass = value.is_finite() && value <= tolerance;
        self.pass &= pass;
        self.checks.push(CheckResult {
            name: name.to_string(),
            value,
            tolerance,
            pass,
        });
    }

    /// Boolean check: records defect 0 or 1 against tolerance 1/2.
    pub fn check_flag(&mut self, name: &str, ok: bool) {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.5);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn artifact(&mut self, path: &Path) {
        self.artifacts.push(path.display().to_string());
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let body = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, body)
    }

    /// Human-readable table, one line per check.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.scenario));
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {:<40} value {:>12.4e}  tolerance {:>9.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("  [warn] {w}\n"));
        }
        out.push_str(&format!(
            "result: {} ({} checks, {:.2}s)\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.runtime_seconds
        ));
        out
    }
}
