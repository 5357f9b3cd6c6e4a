//! End-to-end runs of the `badapprox` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn out_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("badapprox-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_badapprox"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# badapprox "));
    lines.map(|l| l.split(',').map(|f| f.trim_matches('"').to_string()).collect()).collect()
}

#[test]
fn golden_records() {
    let dir = out_dir("golden");
    let out = run(&["records", "--subject", "golden", "--t-max", "1e4"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.join("records.csv"));
    assert_eq!(rows[0], ["t", "value", "witness", "log10_t", "log10_value"]);
    let ts: Vec<u64> = rows[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ts[..8], [1, 2, 3, 5, 8, 13, 21, 34]);
    assert_eq!(*ts.last().unwrap(), 6765);
    assert_eq!(rows[2][2], "1 2");

    let s = summary(&dir);
    assert_eq!(s["command"], "records");
    assert_eq!(s["exit_code"], 0);
    assert_eq!(s["records_count"], 19);
    assert_eq!(s["contains_integer_points"], false);
    let omega = s["estimate"]["omega_hat"].as_f64().unwrap();
    assert!((omega - 1.0).abs() < 0.05);
}

#[test]
fn strict_convention_shifts_record_times() {
    let dir = out_dir("strict");
    let out = run(&["records", "--subject", "golden", "--t-max", "1000", "--convention", "strict"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let ts: Vec<u64> = csv_rows(&dir.join("records.csv"))[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ts[..5], [2, 3, 4, 6, 9]);
}

#[test]
fn rational_line_closes() {
    let dir = out_dir("rational");
    let out = run(&["records", "--subject", "rational:1,1"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("contains_integer_points=true"));
    let s = summary(&dir);
    assert_eq!(s["records_count"], 1);
    assert_eq!(s["estimate"]["omega_hat"], "inf");
}

#[test]
fn records_are_deterministic() {
    let (a, b) = (out_dir("det-a"), out_dir("det-b"));
    for (dir, threads) in [(&a, "1"), (&b, "4")] {
        let out = run(&["records", "--subject", "random_theta:2x1", "--seed", "7", "--t-max", "2e4", "--parallelism", threads], dir);
        assert_eq!(out.status.code(), Some(0));
    }
    let payload = |d: &Path| badapprox_cli::output::payload(&d.join("records.csv")).unwrap();
    assert_eq!(payload(&a), payload(&b));
}

#[test]
fn budget_overrun_keeps_partial_table() {
    let dir = out_dir("budget");
    let out = run(&["records", "--subject", "golden", "--t-max", "1e6", "--set", "budget=2000"], &dir);
    assert_eq!(out.status.code(), Some(3));
    let s = summary(&dir);
    assert_eq!(s["budget_exceeded"], true);
    assert!(s["t_max_scanned"].as_u64().unwrap() < 1_000_000);
    assert!(csv_rows(&dir.join("records.csv")).len() > 2);
}

#[test]
fn configuration_errors() {
    let dir = out_dir("config-err");
    let out = run(&["records", "--set", "no_such_key=1"], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_key"));
    assert_eq!(run(&["records", "--subject", "theta:2x2:1"], &dir).status.code(), Some(2));
    assert_eq!(run(&["records", "--t-max", "1"], &dir).status.code(), Some(2));
}

#[test]
fn config_file_with_overrides() {
    let dir = out_dir("config-file");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "# algebraic cubic\nsubject = algebraic:3\nt_max = 2000\nmethod = MAX_RATIO\n").unwrap();
    let out = run(&["exponent", "--config", path.to_str().unwrap(), "--t-max", "3000"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&dir);
    assert_eq!(s["command"], "exponent");
    assert_eq!(s["config"]["subject"], "algebraic:3");
    assert_eq!(s["config"]["t_max"], "3000");
    assert_eq!(s["estimate"]["method"], "MAX_RATIO");
    assert!(!dir.join("records.csv").exists());
}

#[test]
fn series_classification() {
    let dir = out_dir("series");
    let out = run(&["series", "--set", "series_t_max=1e5"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&dir)["classification"], "CONVERGES");
    let rows = csv_rows(&dir.join("profile.csv"));
    assert_eq!(rows[0], ["T", "mu", "M", "lambda", "term", "partial_sum"]);
    assert_eq!(rows.last().unwrap()[0], "100000");

    let out = run(&["series", "--set", "phi=1,1.5", "--set", "series_t_max=1e4"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&dir)["classification"], "DIVERGES");
}

#[test]
fn lemma2_exit_codes() {
    let dir = out_dir("lemma2");
    let out = run(&["lemma2", "--subject", "golden", "--set", "shift_count=50"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.join("lemma2.csv"));
    assert_eq!(rows[0], ["T", "shift_id", "count"]);
    assert_eq!(rows.len(), 1 + 150);
    assert_eq!(summary(&dir)["origin_only_at_scale_1"], true);

    let out = run(&["lemma2", "--subject", "rational:1,1"], &dir);
    assert_eq!(out.status.code(), Some(5));
    let out = run(&["lemma2", "--subject", "random_theta:1x1"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_theorem_small_run() {
    let dir = out_dir("verify");
    let out = run(&["verify-theorem", "--samples", "8", "--t-max", "2000", "--set", "b_t_max=1e4"], &dir);
    assert!(matches!(out.status.code(), Some(0) | Some(4)));
    let rows = csv_rows(&dir.join("samples.csv"));
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0][0], "sample_id");
    let s = summary(&dir);
    assert_eq!(s["samples"], 8);
    let bound = s["bound"].as_f64().unwrap();
    let omega_b = s["omega_b"].as_f64().unwrap();
    assert!((bound - (2.0 * omega_b + 1.0)).abs() < 1e-12);
}
