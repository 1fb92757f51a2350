//! End-to-end checks of the installed binary: exit codes, report files,
//! bench output, field export, and run-to-run determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ovhardy")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("spawn ovhardy")
}

/// Small, fast configuration used by most tests.
const SMALL: &str = r#"{
    "grid": 256,
    "scale-nodes": 12,
    "duality-fields": 3,
    "families": [{"kind": "band-limited", "kmax": 4, "count": 2}]
}"#;

fn write_small(dir: &Path) -> String {
    let path = dir.join("small.json");
    std::fs::write(&path, SMALL).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn verify_identities_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small(dir.path());
    let out = run(&[
        "verify-identities",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "stdout:\n{stdout}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("[PASS] identities/plancherel"), "{stdout}");
    assert!(!stdout.contains("[FAIL]"), "{stdout}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert!(report["rows"].as_array().unwrap().len() >= 11);
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("suite"));
    assert!(csv.lines().count() >= 12);
}

#[test]
fn impossible_tolerance_exits_one_and_lists_failures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.json");
    std::fs::write(
        &path,
        r#"{
            "grid": 256,
            "scale-nodes": 12,
            "duality-fields": 3,
            "families": [{"kind": "band-limited", "kmax": 4, "count": 2}],
            "tolerances": {"polarization": 1e-30, "fe-identity": 1e-30}
        }"#,
    )
    .unwrap();
    let out = run(&[
        "verify-identities",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stdout.contains("[FAIL]"), "{stdout}");
    assert!(stderr.contains("identities/"), "{stderr}");
    // The report is still written, with the overall flag down.
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(false));
}

#[test]
fn unknown_config_key_exits_two_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"grid": 256, "scale_nodes": 12}"#).unwrap();
    let out = run(&["verify-dyadic", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("config error"), "{stderr}");
}

#[test]
fn invalid_dimension_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dim": 3}"#).unwrap();
    let out = run(&["verify-dyadic", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
}

#[test]
fn export_field_roundtrips_through_the_reader() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bump.ovf");
    let out = run(&[
        "export-field",
        "--grid",
        "64",
        "--seed",
        "9",
        "--spec",
        r#"{"kind": "gaussian-bump", "sigma": 1.0, "count": 1}"#,
        "--path",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let f = ovhardy::io::read_field(&path).unwrap();
    assert_eq!(f.grid.nsamp, 64);
    assert_eq!(f.grid.n, 2);
    assert!(f.lp_norm(f64::INFINITY).unwrap() > 0.0);
}

#[test]
fn bench_writes_a_timing_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "bench",
        "--grid",
        "128",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("operation"));
    assert!(csv.contains("fft-roundtrip"));
    assert!(csv.contains("cover-search-10k"));
}

#[test]
fn reports_are_deterministic_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small(dir.path());
    let mut rows = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        std::fs::create_dir(&out_dir).unwrap();
        let out = run(&[
            "verify-dyadic",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
                .unwrap();
        // Timing rows are the one sanctioned source of run-to-run noise.
        let fixed: Vec<&serde_json::Value> = report["rows"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| r["check"] != "cover-seconds")
            .collect();
        rows.push(serde_json::json!(fixed));
    }
    assert_eq!(rows[0], rows[1], "observed values drifted between runs");
}

#[test]
fn thread_override_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small(dir.path());
    let mut rows = Vec::new();
    for (sub, threads) in [("t1", "1"), ("t4", "4")] {
        let out_dir = dir.path().join(sub);
        std::fs::create_dir(&out_dir).unwrap();
        let out = run(&[
            "verify-identities",
            "--config",
            &cfg,
            "--threads",
            threads,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
                .unwrap();
        rows.push(report["rows"].clone());
    }
    assert_eq!(rows[0], rows[1], "thread count changed observed values");
}
