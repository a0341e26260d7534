use std::path::Path;
use std::process::{Command, Output};

fn qlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlink"))
        .args(args)
        .env_remove("QLINK_OUT_DIR")
        .output()
        .expect("binary runs")
}

/// Data rows of a CSV file, skipping `#` metadata and the header.
fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = qlink(&["simulate", "--t-end", "4", "-o", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(rows(&a).len(), 4 * 200 + 1);
}

#[test]
fn zero_coupling_gives_flat_population() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("flat.csv");
    let out = qlink(&[
        "simulate",
        "--gamma-tau",
        "0",
        "--t-end",
        "3",
        "-o",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for r in rows(&p) {
        assert_eq!(r[1].parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn invalid_input_exits_with_an_error() {
    let out = qlink(&["simulate", "--gamma-tau", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("qlink: "));
    assert!(out.stdout.is_empty());
}

#[test]
fn scan_marks_failed_rows_and_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("scan.csv");
    let out = qlink(&[
        "scan",
        "--grid",
        "0.1,100",
        "--protocols",
        "czkm",
        "-o",
        p.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = rows(&p);
    assert_eq!(r.len(), 2);
    assert_eq!(r[0].last().unwrap(), "ok");
    assert!(r[1].last().unwrap().starts_with("error: "));
    assert!(dir.path().join("scan_summary.json").exists());
}

#[test]
fn output_directory_names_files_by_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qlink"))
        .args(["protocol", "czkm", "--gamma-tau", "1", "--t", "10"])
        .env("QLINK_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("protocol.csv").exists());
    assert!(!rows(&dir.path().join("protocol_dark_bright.csv")).is_empty());
}

#[test]
fn json_protocol_report() {
    let out = qlink(&[
        "--format",
        "json",
        "protocol",
        "czkm",
        "--gamma-tau",
        "1",
        "--t",
        "10",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eps = v["run"]["infidelity"].as_f64().unwrap();
    let exact = v["czkm_exact_error"].as_f64().unwrap();
    let bound = v["czkm_bound"].as_f64().unwrap();
    assert!((eps - exact).abs() < 1e-6);
    assert!(exact >= bound);
}

#[test]
fn spectrum_writes_map_and_eigen_table() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("spec.csv");
    let out = qlink(&[
        "spectrum",
        "--delta-points",
        "5",
        "--omega-points",
        "50",
        "-o",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(rows(&p).len(), 5 * 50);
    assert!(!rows(&dir.path().join("spec_eigen.csv")).is_empty());
}
