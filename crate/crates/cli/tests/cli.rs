//! End-to-end tests of the `explicate` binary: exit codes, config
//! validation, artifact determinism.

use std::path::Path;
use std::process::{Command, Output};

fn explicate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_explicate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn list_names_all_scenarios() {
    let out = explicate(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "ground_state",
        "coherent",
        "free_packet",
        "cubic",
        "two_slit_preset",
        "lattice_demo",
        "filter_demo",
        "spinor_demo",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn missing_config_exits_2() {
    let out = explicate(&["run", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_dt_ordering_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"version": 1, "scenario": "coherent",
            "time": {"dt": 0.1, "dt_out": 0.01, "duration": 1.0}}"#,
    );
    let out = explicate(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("time.dt"), "stderr: {err}");
}

#[test]
fn unknown_key_exits_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "unknown.json",
        r#"{"version": 1, "scenario": "coherent", "dtt": 0.1}"#,
    );
    let out = explicate(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("dtt"), "stderr: {err}");
}

#[test]
fn unknown_scenario_exits_2_listing_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "kind.json",
        r#"{"version": 1, "scenario": "warp_drive"}"#,
    );
    let out = explicate(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("ground_state"), "stderr should list kinds: {err}");
}

#[test]
fn spinor_demo_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "spinor.json",
        r#"{"version": 1, "scenario": "spinor_demo"}"#,
    );
    let out_dir = dir.path().join("out");
    let out = explicate(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert_eq!(report["scenario"], "spinor_demo");
    assert!(report["checks"].as_array().unwrap().len() >= 5);
    assert!(out_dir.join("spinor_report.json").exists());
}

#[test]
fn quiet_suppresses_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "filter.json",
        r#"{"version": 1, "scenario": "filter_demo"}"#,
    );
    let out_dir = dir.path().join("out");
    let out = explicate(&[
        "run",
        &cfg,
        "--quiet",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn tolerance_override_can_force_a_check_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "strict.json",
        r#"{"version": 1, "scenario": "spinor_demo",
            "tolerances": {"polar-reconstruction": 0.0}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = explicate(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "check failure must exit 1");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(false));
}

#[test]
fn identical_configs_produce_bit_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    // A fast dynamical run: small grid, short trace.
    let cfg = write_config(
        dir.path(),
        "fast.json",
        r#"{"version": 1, "scenario": "cubic",
            "grid": {"points": 256, "half_width": 12.0},
            "time": {"dt": 1e-3, "dt_out": 1e-2, "duration": 0.08}}"#,
    );
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = explicate(&["run", &cfg, "--quiet", "--output-dir", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for artifact in ["trace.csv", "fields_x.csv", "fields_p.csv"] {
        let a = std::fs::read(out_a.join(artifact)).unwrap();
        let b = std::fs::read(out_b.join(artifact)).unwrap();
        assert_eq!(a, b, "{artifact} differs between identical runs");
    }
}

#[test]
fn runtime_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // Strong downhill cubic slides the packet into the boundary margin.
    let cfg = write_config(
        dir.path(),
        "runaway.json",
        r#"{"version": 1, "scenario": "cubic",
            "grid": {"points": 256, "half_width": 8.0},
            "hamiltonian": {"mass": 1.0,
                "potential": {"kind": "cubic", "stiffness": 0.0, "cubic": -1.5}},
            "initial": {"center": 1.0, "width": 0.7071, "momentum": 1.0},
            "time": {"dt": 1e-3, "dt_out": 1e-1, "duration": 8.0}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = explicate(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("boundary") || err.contains("unstable"),
        "stderr: {err}"
    );
}

#[test]
fn lattice_demo_report_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "lattice.json",
        r#"{"version": 1, "scenario": "lattice_demo"}"#,
    );
    let out_dir = dir.path().join("out");
    let out = explicate(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("lattice_report.json")).unwrap())
            .unwrap();
    assert_eq!(doc["blocks"].as_array().unwrap().len(), 2);
    assert_eq!(doc["counterexample"]["rhs_rank"], 0);
    assert_eq!(doc["counterexample"]["lhs_equals_a"], true);
}
