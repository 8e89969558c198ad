use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cavity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&cavity(&["check", "--preset", "case1"])), 0);
    assert_eq!(code(&cavity(&["check", "--preset", "case4"])), 0);
    let o = cavity(&["check", "-n", "3", "--gamma", "1.6667", "--lambda", "1", "--kappa", "0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("(A) FAIL"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&cavity(&["check", "--preset", "case9"])), 1);
    assert_eq!(code(&cavity(&["check"])), 1);
    assert_eq!(code(&cavity(&["check", "--preset", "case1", "--kappa", "0.1"])), 1);
    assert_eq!(code(&cavity(&["check", "-n", "3", "--gamma", "x", "--lambda", "1", "--kappa", "0"])), 1);
    assert_eq!(code(&cavity(&["solve", "--preset", "case1", "--method", "euler"])), 1);
    assert_eq!(code(&cavity(&["frobnicate"])), 1);
}

#[test]
fn solve_refuses_failing_conditions_unless_forced() {
    let bad = ["solve", "-n", "3", "--gamma", "5/3", "--lambda", "1.25", "--kappa", "-0.9"];
    assert_eq!(code(&cavity(&bad)), 2);
    let mut forced = bad.to_vec();
    forced.push("--force");
    assert_eq!(code(&cavity(&forced)), 3);
}

#[test]
fn points_table_for_case1() {
    let o = cavity(&["points", "--preset", "case1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let row = |id: &str| text.lines().find(|l| l.starts_with(id)).unwrap().to_string();
    assert!(row("P6,").contains(",node,"));
    assert!(row("P2,").contains(",degenerate,"));
    let p4_row = row("P4,");
    let p4: Vec<&str> = p4_row.split(',').collect();
    assert_eq!(p4[2].parse::<f64>().unwrap(), -0.625);
}

#[test]
fn solve_writes_trajectory_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&cavity(&["solve", "--preset", "case1", "--out", out])), 0);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,V,C,W,Z,D,G,F,segment");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() > 100);
    assert!(rows.iter().all(|r| r.len() == 9));
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), -1.0);
    assert!(rows.iter().any(|r| r[8] == "P6toP1"));

    let s = json(&dir.path().join("summary.json"));
    for key in ["x0", "x6", "nu", "omega", "ell", "events"] {
        assert!(s.get(key).is_some(), "{key}");
    }
    assert_eq!(s["x0"].as_f64().unwrap(), -1.0);
    let x6 = s["x6"].as_f64().unwrap();
    assert!(x6 > -1.0 && x6 < 0.0);
    assert!(s["omega"].as_f64().unwrap() < 0.0);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = d.path().to_str().unwrap();
        assert_eq!(code(&cavity(&["solve", "--preset", "case3", "--out", out])), 0);
        assert_eq!(code(&cavity(&["reconstruct", "--preset", "case3", "--out", out, "--radii", "8"])), 0);
    }
    for name in ["trajectory.csv", "summary.json", "fields.csv", "fields.json", "residual.json"] {
        let (x, y) = (fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
        assert!(x == y, "{name} differs");
    }
}

#[test]
fn reconstruct_writes_fields_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cavity(&["reconstruct", "--preset", "case6", "--out", out, "--times", "-1,-0.01", "--radii", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(dir.path().join("fields.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,r,rho,u,c,p");
    assert_eq!(lines.count(), 10);
    let h = json(&dir.path().join("fields.json"));
    assert_eq!(h["x0"].as_f64().unwrap(), -1.0);
    assert_eq!(h["adiabatic_constant"].as_f64().unwrap(), 1.0);
    assert_eq!(h["params"]["n"].as_u64().unwrap(), 2);
    let b = json(&dir.path().join("boundary.json"));
    let p = b["pressure"]["fitted"].as_f64().unwrap();
    let predicted = b["pressure"]["predicted"].as_f64().unwrap();
    assert!(((p - predicted) / predicted).abs() < 0.02);
}

#[test]
fn case1_pressure_exponent() {
    let o = cavity(&["reconstruct", "--preset", "case1", "--format", "json", "--radii", "4"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let fitted = v["boundary"]["pressure"]["fitted"].as_f64().unwrap();
    assert!((fitted - 3.32224).abs() / 3.32224 < 0.02, "{fitted}");
}

#[test]
fn portrait_bundle_contents() {
    let o = cavity(&["portrait", "--preset", "case1", "--nv", "5", "--nc", "4"]);
    assert_eq!(code(&o), 0);
    let b: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((b["nullcline_g"]["asymptote_v"].as_f64().unwrap() + 0.102).abs() < 1e-12);
    assert!(!b["nullcline_g"]["left"].as_array().unwrap().is_empty());
    assert!(!b["nullcline_g"]["right"].as_array().unwrap().is_empty());
    assert!(!b["nullcline_f"].as_array().unwrap().is_empty());
    assert_eq!(b["direction_field"].as_array().unwrap().len(), 20);
    assert_eq!(b["sonic_line"].as_array().unwrap().len(), 2);
    let gamma = b["gamma"].as_array().unwrap();
    let first = &gamma[0];
    let last = &gamma[gamma.len() - 1];
    assert_eq!(first["v"].as_f64().unwrap(), -1.0);
    assert!(last["v"].as_f64().unwrap().abs() < 1e-5);
    // the trajectory passes through the supersonic region
    assert!(gamma.iter().any(|p| p["c"].as_f64().unwrap() > 1.0 + p["v"].as_f64().unwrap()));
}

#[test]
fn parameter_file_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(&path, r#"{"n": 3, "gamma": 1.4, "lambda": 1.16, "kappa": -0.01}"#).unwrap();
    let from_file = cavity(&["solve", "--params", path.to_str().unwrap(), "--format", "json"]);
    let from_preset = cavity(&["solve", "--preset", "case2", "--format", "json"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(from_file.stdout, from_preset.stdout);
    fs::write(&path, r#"{"n": 3, "gamma": 1.4, "lambda": 1.16}"#).unwrap();
    assert_eq!(code(&cavity(&["check", "--params", path.to_str().unwrap()])), 1);
}

#[test]
fn sweep_around_a_preset() {
    let o = cavity(&["check", "--preset", "case1", "--sweep", "--sweep-radius", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));

    let o = cavity(&["solve", "--preset", "case1", "--sweep", "--sweep-radius", "1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r["omega"].as_f64().unwrap() < 0.0));
}

#[test]
fn every_method_is_selectable() {
    for m in ["dopri5", "cash-karp", "rkf45", "bs23", "rk4-doubling"] {
        let o = cavity(&["solve", "--preset", "case2", "--method", m, "--format", "json"]);
        assert_eq!(code(&o), 0, "{m}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["method"], m);
    }
}
