use std::process::Command;

use contention::analysis::{
    BoundReport, DeadlineComparison, ExpectationTable, FeasibilityReport, PersistentDistribution,
};
use contention::cli::run_with;
use contention::engine::LatencyStats;
use contention::Schedule;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("contention").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn schedule_with_unit_growth() {
    let (code, out, _) = run(&["schedule", "--c", "1", "--k", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["s"], serde_json::json!([2, 4, 6, 8]));
    let sched: Schedule = serde_json::from_str(&out).unwrap();
    assert_eq!(sched.horizon_k(), 3);
}

#[test]
fn schedule_csv() {
    let (code, out, _) = run(&["schedule", "--c", "11/10", "--k", "8", "--format", "csv"]);
    assert_eq!(code, 0);
    let s: Vec<&str> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(s, ["2", "4", "6", "8", "10", "13", "16", "19", "23"]);
}

#[test]
fn feasibility_reference() {
    let (code, out, _) = run(&["feasibility", "--c", "11/10", "--p", "0.75"]);
    assert_eq!(code, 0);
    let r: FeasibilityReport = serde_json::from_str(&out).unwrap();
    assert!(r.feasible);
    assert_eq!(r.thresholds.inv_beta.exact.to_string(), "64/55");
    assert_eq!(r.thresholds.persist_lb.exact.to_string(), "16/15");
}

#[test]
fn infeasible_names_inequality() {
    let (code, out, err) = run(&["feasibility", "--c", "1.05"]);
    assert_eq!(code, 2);
    assert!(err.contains("16/15"), "{err}");
    let r: FeasibilityReport = serde_json::from_str(&out).unwrap();
    assert!(!r.feasible);

    let (code, _, err) = run(&["bounds", "--c", "6/5"]);
    assert_eq!(code, 2);
    assert!(err.contains("64/55"), "{err}");
}

#[test]
fn bounds_report() {
    let (code, out, _) = run(&["bounds", "--c", "11/10", "--p", "0.75", "--k1", "2"]);
    assert_eq!(code, 0);
    let r: BoundReport = serde_json::from_str(&out).unwrap();
    assert!(r.y30_upper <= 2759.0);
    assert_eq!(r.k1, 2);
}

#[test]
fn analyze_modes() {
    let (code, out, _) = run(&["analyze", "--persistent", "--zmax", "200"]);
    assert_eq!(code, 0);
    let d: PersistentDistribution = serde_json::from_str(&out).unwrap();
    assert_eq!(d.partial_expectations.len(), 201);

    let (code, out, _) = run(&["analyze", "--expectations", "--semantics", "paper-series", "--K", "30"]);
    assert_eq!(code, 0);
    let t: ExpectationTable = serde_json::from_str(&out).unwrap();
    assert_eq!(t.truncation_k, 30);
    assert!(out.contains("\"semantics\": \"paper-series\""));

    let (code, _, _) = run(&["analyze"]);
    assert_eq!(code, 2);
}

#[test]
fn compare_deadline() {
    let (code, out, _) = run(&["compare-deadline", "--t0", "5"]);
    assert_eq!(code, 0);
    let r: DeadlineComparison = serde_json::from_str(&out).unwrap();
    assert_eq!(r.xi, 2);
    assert!(out.contains("\"prE_lower\": 0.390625"));
}

#[test]
fn simulate_json_and_samples() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("samples.csv");
    let cfg = data("all_p.json");
    let args = [
        "simulate",
        "--config",
        &cfg,
        "--trials",
        "500",
        "--seed",
        "3",
        "--samples",
        samples.to_str().unwrap(),
    ];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    let stats: LatencyStats = serde_json::from_str(&out).unwrap();
    assert_eq!(stats.trials, 500);
    let text = std::fs::read_to_string(&samples).unwrap();
    assert!(text.starts_with("trial_index,player,latency,censored\n"));
    assert_eq!(text.lines().count(), 1 + 500 * 3);

    // same argv, same bytes
    let (_, again, _) = run(&args);
    assert_eq!(out, again);

    let (code, csv, _) = run(&[
        "simulate", "--config", &cfg, "--trials", "500", "--seed", "3", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(csv, text);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = run(&["bounds", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let r: BoundReport = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r.k1, r.k1_min);
}

#[test]
fn bad_arguments() {
    assert_eq!(run(&["schedule", "--c", "abc"]).0, 2);
    assert_eq!(run(&["feasibility", "--p", "1.5"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let (code, _, err) = run(&["simulate", "--config", "/nonexistent/game.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    assert_eq!(run(&["simulate", "--trials", "10", "--focus", "3"]).0, 1);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_contention");
    let ok = Command::new(bin)
        .args(["schedule", "--c", "2", "--k", "2"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("14"));
    let bad = Command::new(bin).args(["bounds", "--c", "3/2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let usage = Command::new(bin).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
}
