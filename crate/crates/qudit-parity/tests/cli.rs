use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qudit-parity"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("spawn");
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn run_json(args: &[&str]) -> Value {
    serde_json::from_str(&run_ok(args)).expect("json output")
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn");
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    assert!(!out.stderr.is_empty());
    out
}

#[test]
fn run_positive_permutation() {
    let v = run_json(&["run", "--d", "4", "--m", "3", "--sign", "+"]);
    assert_eq!(v["parity"], "positive");
    assert_eq!(v["outcome_index"], 1);
    assert_eq!(v["queries_used"], 1);
    assert!((v["success_prob"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn run_negative_permutation() {
    let v = run_json(&["run", "--d", "5", "--m", "2", "--sign", "-"]);
    assert_eq!(v["parity"], "negative");
    assert_eq!(v["outcome_index"], 4);
}

#[test]
fn run_rejects_bad_input() {
    let out = run_err(&["run", "--d", "2", "--m", "1", "--sign", "-"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("2"));
    run_err(&["run", "--d", "4", "--m", "4", "--sign", "+"]);
    run_err(&["run", "--d", "4", "--m", "1", "--sign", "x"]);
}

#[test]
fn photonic_run_counts_add_up() {
    let v = run_json(&[
        "run",
        "--d",
        "4",
        "--m",
        "1",
        "--sign",
        "+",
        "--noise",
        "calibrated",
        "--shots",
        "500",
        "--seed",
        "9",
    ]);
    let c = &v["coincidences"];
    let total: u64 = ["HH", "HV", "VH", "VV"].iter().map(|k| c[k].as_u64().unwrap()).sum();
    assert_eq!(c["shots"], 500);
    assert_eq!(total, 500);
}

#[test]
fn ideal_sweep_always_succeeds() {
    let csv = run_ok(&["sweep", "--dims", "3-6", "--format", "csv"]);
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("average_success"));
    assert!(last.ends_with("1.000000"), "{last}");
}

#[test]
fn seeded_sweep_is_reproducible() {
    let args =
        ["sweep", "--noise", "calibrated", "--shots", "300", "--seed", "42", "--format", "csv"];
    let a = run_ok(&args);
    let b = run_ok(&args);
    assert_eq!(a, b);
    let c = run_ok(&[
        "sweep",
        "--noise",
        "calibrated",
        "--shots",
        "300",
        "--seed",
        "43",
        "--format",
        "csv",
    ]);
    assert_ne!(a, c);
}

#[test]
fn hom_scan_is_symmetric_with_a_zero() {
    let v = run_json(&["hom", "--delays", "-300:300:50"]);
    let pts = v["points"].as_array().unwrap();
    let ys: Vec<f64> =
        pts.iter().map(|p| p["coincidence"].as_f64().or_else(|| p[1].as_f64()).unwrap()).collect();
    assert_eq!(ys.len(), 13);
    for (a, b) in ys.iter().zip(ys.iter().rev()) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(ys[6].abs() < 1e-12);
    assert!((v["visibility"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn lower_bound_certificate() {
    let v = run_json(&["lower-bound", "--d", "4"]);
    assert!((v["best_one_query_worst_case"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["quantum_queries"], 1);
    run_err(&["lower-bound", "--d", "9"]);
}

#[test]
fn simulated_tomography_round_trips_through_counts_file() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.json");
    let counts_s = counts.to_str().unwrap();
    let v = run_json(&["tomo", "--simulate", "--seed", "5", "--emit-counts", counts_s]);
    assert!(v["fidelity"].as_f64().unwrap() > 0.999);
    let w = run_json(&["tomo", "--counts", counts_s]);
    assert!((v["fidelity"].as_f64().unwrap() - w["fidelity"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn malformed_counts_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"[{"setting": ["H", "Q"], "counts": {"HH": 1}}]"#).unwrap();
    run_err(&["tomo", "--counts", bad.to_str().unwrap()]);
    fs::write(&bad, "not json").unwrap();
    run_err(&["tomo", "--counts", bad.to_str().unwrap()]);
    run_err(&["tomo", "--counts", dir.path().join("missing.json").to_str().unwrap()]);
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"d": 4, "m": 1, "sign": "-", "seed": 3}"#).unwrap();
    let out = dir.path().join("out.json");
    run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "run",
        "--sign",
        "+",
    ]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["parity"], "positive");
    assert_eq!(v["config"]["sign"], "+");
    assert_eq!(v["config"]["d"], 4);
    assert_eq!(v["config"]["seed"], 3);
}

#[test]
fn unknown_config_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"dd": 4}"#).unwrap();
    run_err(&["--config", cfg.to_str().unwrap(), "lower-bound", "--d", "4"]);
}

#[test]
fn csv_output_carries_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hom.csv");
    run_ok(&["hom", "--format", "csv", "--out", out.to_str().unwrap()]);
    let text = fs::read_to_string(Path::new(&out)).unwrap();
    assert!(text.starts_with("# config: {"));
    assert_eq!(text.lines().nth(1).unwrap(), "delay,coincidence");
}

#[test]
fn explore_submodule() {
    let v = run_json(&["explore", "--theta-deg", "22.5"]);
    assert!(v.get("coherent").is_some());
}
