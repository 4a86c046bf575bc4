use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn specfid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specfid")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(out)).unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    stdout(out).lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn number(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn maximally_mixed_with_itself() {
    let v = json(&specfid(&["fidelity", "--rho-bloch", "0,0,0", "--sigma-bloch", "0,0,0", "--t", "0.3"]));
    assert!((v["result"]["spectral"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["timestamp"].is_u64());
}

#[test]
fn pure_qubits_follow_half_angle_law() {
    let theta: f64 = 1.1;
    let sigma = format!("{},0,{}", theta.sin(), theta.cos());
    for t in [0.2, 0.5, 0.9] {
        let out = specfid(&["fidelity", "--rho-bloch", "0,0,1", "--sigma-bloch", &sigma, "--t", &t.to_string()]);
        let got = json(&out)["result"]["spectral"]["value"].as_f64().unwrap();
        assert!((got - (theta / 2.0).cos().powf(2.0 * t)).abs() < 1e-12);
    }
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn counterexample_states_from_files() {
    let replay = json(&specfid(&["dpi-replay", "--no-timestamp"]));
    let dir = tempfile::tempdir().unwrap();
    let rho = write_json(dir.path(), "rho.json", &replay["result"]["rho"]);
    let sigma = write_json(dir.path(), "sigma.json", &replay["result"]["sigma"]);
    let v = json(&specfid(&["fidelity", "--rho", &rho, "--sigma", &sigma, "--t", "0.8", "--all", "--alpha", "0.5"]));
    let value = v["result"]["spectral"]["value"].as_f64().unwrap();
    assert!((value - 0.755086).abs() < 1e-4);
    let uhl = v["result"]["uhlmann"].as_f64().unwrap();
    let renyi = v["result"]["sandwiched_renyi"][0]["value"].as_f64().unwrap();
    assert!((renyi + 2.0 * uhl.ln()).abs() < 1e-8);
}

#[test]
fn sweep_of_identical_states_is_flat() {
    let out = specfid(&[
        "sweep",
        "--rho-bloch",
        "0.1,0.2,0.3",
        "--sigma-bloch",
        "0.1,0.2,0.3",
        "--t-grid",
        "0:1:11",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("t,value,log_value,second_diff,log_second_diff\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| (number(&r[1]) - 1.0).abs() < 1e-12));
}

#[test]
fn sweep_of_pure_pair_is_log_linear_with_unit_endpoints_for_mixed() {
    let out = specfid(&["sweep", "--rho-bloch", "0,0,1", "--sigma-bloch", "0.6,0,0.8", "--format", "csv"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 21);
    for r in &rows[1..20] {
        assert!(number(&r[4]).abs() < 1e-12);
    }
    let out = specfid(&["sweep", "--rho-bloch", "0,0,0.5", "--sigma-bloch", "0.3,0,0.4", "--format", "csv"]);
    let rows = csv_rows(&out);
    assert!((number(&rows[0][1]) - 1.0).abs() < 1e-10 && (number(&rows[20][1]) - 1.0).abs() < 1e-10);
}

#[test]
fn verify_exit_codes_follow_verdicts() {
    let mid = specfid(&["verify", "dpi_monotone", "--t", "0.5", "--dims", "2", "--samples", "200", "--no-timestamp"]);
    assert_eq!(json(&mid)["result"][0]["verdict"], "holds");
    let off = specfid(&["verify", "dpi_monotone", "--t", "0.8", "--dims", "2", "--samples", "200", "--no-timestamp"]);
    let v = json(&off);
    assert_eq!(v["result"][0]["verdict"], "fails_as_predicted");
    assert!(v["result"][0]["max_violation"].as_f64().unwrap() > 1e-7);
    let concave = specfid(&["verify", "separate_concavity", "--dims", "2", "--samples", "100"]);
    assert_eq!(concave.status.code(), Some(1));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args =
        ["verify", "flip_symmetry", "second_fvg", "--dims", "2,3", "--samples", "20", "--seed", "5", "--no-timestamp"];
    let (a, b) = (specfid(&args), specfid(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let search = ["dpi-search", "--t", "0.3", "--dims", "2", "--no-timestamp"];
    assert_eq!(specfid(&search).stdout, specfid(&search).stdout);
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let out = specfid(&["fvg", "--t", "0.25", "--c", "0.5", "--no-timestamp"]);
    let text = stdout(&out);
    assert!(text.contains("\"half_trace_dist\": 8.6602540378443871e-1"), "{text}");
    let v = json(&out);
    let margin = v["result"]["margin"].as_f64().unwrap();
    assert!((margin - (0.75f64.sqrt() - 0.5f64.sqrt())).abs() < 1e-6);
    assert_eq!(v["result"]["violated"], true);
}

#[test]
fn config_file_replays_a_run_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "midpoint_uhlmann", "--dims", "2", "--samples", "15", "--seed", "9", "--no-timestamp"];
    let printed = specfid(&[&args[..], &["--print-config"]].concat());
    assert_eq!(printed.status.code(), Some(0));
    let cfg_path = dir.path().join("run.json");
    std::fs::write(&cfg_path, &printed.stdout).unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let direct = specfid(&args);
    let replayed = specfid(&["verify", "--config", cfg]);
    assert_eq!(direct.stdout, replayed.stdout);
    let overridden = json(&specfid(&["verify", "--config", cfg, "--seed", "10"]));
    assert_eq!(overridden["config"]["seed"], 10);
    assert_eq!(overridden["config"]["samples"], 15);
    let wrong = specfid(&["fvg", "--config", cfg]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn output_file_and_tolerance_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = specfid(&[
        "verify",
        "flip_symmetry",
        "--dims",
        "2",
        "--samples",
        "10",
        "--tol-override",
        "flip_symmetry=1e-3",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "holds");
    assert_eq!(number(row[3]), 1e-3);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_state =
        write_json(dir.path(), "bad.json", &serde_json::json!({ "dim": 2, "re": [[1.0, 0.5], [0.0, 0.0]] }));
    let cases: Vec<Vec<&str>> = vec![
        vec!["sweep", "--rho-bloch", "0,0,1", "--sigma-bloch", "0,0,1", "--t-grid", "1:0:3"],
        vec!["sweep", "--rho-bloch", "0,0,1", "--sigma-bloch", "0,0,1", "--t-grid", "0:2:3"],
        vec!["fidelity", "--rho", "/nonexistent/rho.json", "--sigma-bloch", "0,0,1"],
        vec!["fidelity", "--rho", &bad_state, "--sigma-bloch", "0,0,1"],
        vec!["fidelity", "--rho-bloch", "1,1,1", "--sigma-bloch", "0,0,1"],
        vec!["fidelity", "--rho-bloch", "0,0,1"],
        vec!["fidelity", "--rho-bloch", "0,0,1", "--sigma-bloch", "0,0,1", "--t", "1.5"],
        vec!["verify", "no_such_property"],
        vec!["verify", "flip_symmetry", "--tol-override", "nope=1"],
        vec!["verify", "flip_symmetry", "--dims", "1"],
        vec!["dpi-search"],
        vec!["fvg", "--t", "0.2", "--c", "1.0"],
        vec!["dpi-replay", "--extra"],
    ];
    for args in cases {
        let out = specfid(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let missing = specfid(&["fidelity", "--rho", "/nonexistent/rho.json", "--sigma-bloch", "0,0,1"]);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/rho.json"));
}

#[test]
fn fvg_region_marks_pure_state_violations() {
    let out = specfid(&["fvg", "--t-grid", "0.1:0.9:5", "--c-grid", "0.2:0.8:3", "--format", "csv"]);
    for r in csv_rows(&out) {
        let t = number(&r[0]);
        assert_eq!(r[5] == "true", t < 0.5, "{r:?}");
    }
}
