use std::process::{Command, Output};

use serde_json::Value;

fn bilap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilap")).args(args).output().expect("spawn bilap")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn spectrum_rows_follow_closed_form() {
    let v = json(&bilap(&["spectrum", "--n", "2", "--beta", "0", "--kmax", "3", "--format", "json"]));
    let rows = v["rows"].as_array().unwrap();
    let got: Vec<(u64, f64, u64)> = rows
        .iter()
        .map(|r| (r["k"].as_u64().unwrap(), r["eigenvalue"].as_f64().unwrap(), r["multiplicity"].as_u64().unwrap()))
        .collect();
    assert_eq!(got, vec![(0, 0.0, 1), (1, 4.0, 2), (2, 24.0, 2), (3, 72.0, 2)]);
}

#[test]
fn solve_reports_first_eigenvalue() {
    let v = json(&bilap(&["solve", "--problem", "p", "--n", "3", "--degree", "6", "--format", "json"]));
    let first = v["eigenvalues"][0].as_f64().unwrap();
    assert!((first - 3.0).abs() < 1e-9, "{first}");
    let csv = bilap(&["solve", "--problem", "lap-dirichlet", "--n", "3", "--degree", "6", "--format", "csv"]);
    assert!(csv.status.success());
    assert!(String::from_utf8_lossy(&csv.stdout).lines().count() >= 2);
}

#[test]
fn cap_hemisphere_and_theta_suffix() {
    let v = json(&bilap(&["cap", "--n", "3", "--theta", "0.5pi", "--format", "json"]));
    assert!((v["lambda1"].as_f64().unwrap() - 3.0).abs() < 1e-8);
    assert!((v["gamma1"].as_f64().unwrap() - 9.0).abs() < 1e-6);
}

#[test]
fn certify_emits_valid_records() {
    let v = json(&bilap(&["certify", "--n", "3", "--beta", "1", "--kmax", "2", "--format", "json"]));
    let recs = v.as_array().expect("array of records");
    assert_eq!(recs.len(), 1 + 3 + 5);
    for r in recs {
        assert_eq!(r["valid"], true);
        assert_eq!(r["pde_residual"], "0");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bilap(&["solve", "--problem", "bogus"]).status.code(), Some(2));
    assert_eq!(bilap(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bilap(&["spectrum", "--n", "abc"]).status.code(), Some(2));
}

#[test]
fn invalid_specs_exit_2() {
    let out = bilap(&["solve", "--problem", "clamped", "--n", "2", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree"));
}

#[test]
fn failing_checks_exit_1() {
    let out = bilap(&["verify", "--n", "2", "--degree", "6", "--tol-strict", "1e6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["failed"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# cap settings\nn = 2\ntheta = 0.5pi\nnodes = 48\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let v = json(&bilap(&["cap", "--config", cfg, "--format", "json"]));
    assert!((v["lambda1"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    let v = json(&bilap(&["cap", "--config", cfg, "--n", "4", "--format", "json"]));
    assert!((v["lambda1"].as_f64().unwrap() - 4.0).abs() < 1e-8);

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(bilap(&["cap", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "verify".to_string(), "--n".into(), "2,3".into(), "--degree".into(), "8".into(),
            "--seed".into(), "7".into(), "--format".into(), "json".into(), "--out".into(), out.into(),
        ]
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let args = args(p.to_str().unwrap());
        let out = Command::new(env!("CARGO_BIN_EXE_bilap")).args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read_to_string(a).unwrap();
    assert_eq!(a, std::fs::read_to_string(b).unwrap());
    let report: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(report["failed"], 0);
    assert!(report["checks"].as_array().unwrap().iter().any(|c| c["id"] == "REILLY/batch"));

    let csv = bilap(&["verify", "--n", "2", "--degree", "6", "--format", "csv"]);
    assert!(csv.status.success());
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("id,"));
}
