use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const RUN: &str = include_str!("../configs/rational_run.json");
const ANALYSIS: &str = include_str!("../configs/rational_analysis.json");

fn tippe(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_tippe"))
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn edit(text: &str, f: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    f(&mut v);
    serde_json::to_string(&v).unwrap()
}

/// Short run so the debug build stays quick.
fn short_run() -> String {
    edit(RUN, |v| {
        v["t_end"] = 0.2.into();
        v["sample_dt"] = 1e-3.into();
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn cmd(verb: &str, config: &Path, out: &Path) -> i32 {
    tippe(&[verb, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn simulate_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", &short_run());
    assert_eq!(cmd("simulate", &cfg, dir.path()), 0);
    let csv = fs::read_to_string(dir.path().join("rational_run.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,theta,theta_dot,phi_dot,omega3,nu_x,nu_y,g_n,lambda,D,E_tilde,E_total");
    assert_eq!(lines.count(), 201);
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("rational_run.json")).unwrap()).unwrap();
    assert_eq!(side["termination"]["completed"], true);
    assert!(side["conservation"]["lambda_drift"].as_f64().unwrap() < 1e-9);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", &short_run());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(cmd("simulate", &cfg, &a), 0);
    assert_eq!(cmd("simulate", &cfg, &b), 0);
    for f in ["rational_run.csv", "rational_run.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn echoed_config_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", &short_run());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(cmd("simulate", &cfg, &a), 0);
    let side: Value = serde_json::from_str(&fs::read_to_string(a.join("rational_run.json")).unwrap()).unwrap();
    let echoed = write(dir.path(), "echo.json", &side["config"].to_string());
    assert_eq!(cmd("simulate", &echoed, &b), 0);
    for f in ["rational_run.csv", "rational_run.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }

    let an = write(dir.path(), "an.json", ANALYSIS);
    assert_eq!(cmd("potential", &an, &a), 0);
    let out: Value = serde_json::from_str(&fs::read_to_string(a.join("rational_analysis.json")).unwrap()).unwrap();
    let echoed = write(dir.path(), "an_echo.json", &out["config"].to_string());
    assert_eq!(cmd("potential", &echoed, &b), 0);
    for f in ["rational_analysis.json", "rational_analysis_scan.csv", "rational_analysis_path.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.json", &edit(RUN, |v| v["t_end"] = 0.0.into()));
    assert_eq!(cmd("simulate", &zero, dir.path()), 2);
    let unknown = write(dir.path(), "unknown.json", &edit(RUN, |v| v["friction"] = 0.3.into()));
    assert_eq!(cmd("simulate", &unknown, dir.path()), 2);
    assert_eq!(cmd("simulate", &dir.path().join("missing.json"), dir.path()), 2);
    let bad = write(dir.path(), "bad.json", &edit(ANALYSIS, |v| v["epsilon"] = 1.5.into()));
    assert_eq!(cmd("potential", &bad, dir.path()), 2);
}

#[test]
fn lift_off_exits_three_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = edit(RUN, |v| {
        v["initial"]["theta"] = 1.4.into();
        v["initial"]["theta_dot"] = 300.0.into();
        v["initial"]["omega3"] = 0.0.into();
        v["t_end"] = 1.0.into();
        v["sample_dt"] = 1e-4.into();
    });
    let cfg = write(dir.path(), "lift.json", &text);
    assert_eq!(cmd("simulate", &cfg, dir.path()), 3);
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("rational_run.json")).unwrap()).unwrap();
    assert_eq!(side["termination"]["completed"], false);
    assert!(side["termination"]["reason"].as_str().unwrap().contains("normal force"));
    let csv = fs::read_to_string(dir.path().join("rational_run.csv")).unwrap();
    assert!(csv.lines().count() > 2);
}

#[test]
fn non_rational_parameters_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let text = edit(ANALYSIS, |v| {
        v["params"]["rational"] = false.into();
        v["params"]["I1"] = 3.0e-6.into();
    });
    let cfg = write(dir.path(), "alg.json", &text);
    assert_eq!(cmd("potential", &cfg, dir.path()), 4);
    assert_eq!(cmd("period", &cfg, dir.path()), 4);
}

#[test]
fn potential_summary_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "an.json", ANALYSIS);
    assert_eq!(cmd("potential", &cfg, dir.path()), 0);
    let out: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rational_analysis.json")).unwrap()).unwrap();
    let s = &out["summary"];
    let dm = s["delta_minus"].as_f64().unwrap();
    assert_eq!(format!("{dm:.2e}"), "1.48e-7");
    let d1 = s["D1"].as_f64().unwrap();
    assert!((d1 / -6.0e-4 - 1.0).abs() < 0.02);
}

#[test]
fn period_rows_within_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let text = edit(ANALYSIS, |v| v["d_grid"] = 20.into());
    let cfg = write(dir.path(), "an.json", &text);
    assert_eq!(cmd("period", &cfg, dir.path()), 0);
    let out: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rational_analysis_period.json")).unwrap()).unwrap();
    let rows = out["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20 * 4);
    for row in rows {
        let rep = &row["report"];
        let t_max = rep["T_max"].as_f64().unwrap();
        assert!((0.0497..=0.0923).contains(&t_max), "{t_max}");
        if row["energy_offset"].as_f64().unwrap() == 0.0 {
            assert_eq!(rep["k2"].as_f64().unwrap(), 0.0);
            assert_eq!(rep["K"].as_f64().unwrap(), std::f64::consts::FRAC_PI_2);
        }
        if row["status"] == "ok" {
            assert!(rep["T_exact"].as_f64().unwrap() <= rep["T_upp"].as_f64().unwrap());
        }
    }
    assert_eq!(out["bound_violations"], 0);
}
