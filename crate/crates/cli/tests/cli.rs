use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfo")).args(args).output().unwrap()
}

fn results(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("results.json")).unwrap()).unwrap()
}

const FIELD: &str = r#"{"kernel":{"family":"squared_exponential","sigma":1,"beta":0.5},"domain":[{"lower":0,"upper":2,"points":11}],"samples":4}"#;

#[test]
fn sample_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = rfo(&["sample", "--set", &format!("field={FIELD}"), "--seed", "12", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("samples.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 4);
    assert!(lines.iter().all(|l| l.split(',').count() == 11));
    let r = results(&out);
    assert_eq!(r["metrics"]["seed"], 12);
    assert_eq!(r["config"]["seed"], 12);
    assert_eq!(r["command"], "sample");
    assert_eq!(r["artifacts"], serde_json::json!(["samples.csv", "results.json"]));
}

#[test]
fn battery_reports_design_and_cost() {
    let dir = tempfile::tempdir().unwrap();
    let o = rfo(&["battery", "--set", "battery.samples=10", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = &results(dir.path())["metrics"];
    for key in ["deterministic", "stochastic"] {
        assert!(m[key]["z_b"].as_f64().unwrap() > 0.0);
        assert!(m[key]["expected_cost"].as_f64().unwrap() > 0.0);
    }
    assert!(m["savings"].is_number());
}

#[test]
fn embedded_config_reproduces_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let o = rfo(&[
        "measure",
        "--set",
        &format!("field={FIELD}"),
        "--set",
        "measure.thresholds=[0,0.5]",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let first = std::fs::read(out.join("results.json")).unwrap();
    let csv = std::fs::read(out.join("measures.csv")).unwrap();
    let cfg = dir.path().join("embedded.json");
    std::fs::write(&cfg, results(&out)["config"].to_string()).unwrap();
    std::fs::remove_dir_all(&out).unwrap();
    let o = rfo(&["--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(out.join("results.json")).unwrap(), first);
    assert_eq!(std::fs::read(out.join("measures.csv")).unwrap(), csv);
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // unknown key, reported by JSON pointer
    let o = rfo(&["battery", "--set", "battery.sampels=3", "--seed", "1", "--out", d]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/battery/sampels"));
    // missing seed
    let o = rfo(&["battery", "--set", "battery={}", "--out", d]);
    assert_eq!(o.status.code(), Some(1));
    // invalid parameter
    let o = rfo(&["battery", "--set", "battery.points=1", "--seed", "1", "--out", d]);
    assert_eq!(o.status.code(), Some(1));
    // infeasible design: demand cannot be met with the grid capped at zero
    let o = rfo(&["battery", "--set", "battery.grid_ub=0", "--set", "battery.samples=2", "--seed", "1", "--out", d]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}
