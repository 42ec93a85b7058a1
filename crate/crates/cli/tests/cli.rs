use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tisr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tisr")).args(args).env_remove("TISR_THREADS").output().unwrap()
}

fn tisr_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tisr")).args(args).env("TISR_THREADS", threads).output().unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "status {:?}\nstderr:\n{}", o.status, String::from_utf8_lossy(&o.stderr));
}

fn lines(p: &Path) -> Vec<String> {
    fs::read_to_string(p).unwrap().lines().map(String::from).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_table_shape_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("spec.csv");
    let o = tisr(&["spectrum", "--a", "0.5", "--dz", "0:3:0.02", "--branches", "6", "--no-check", "--out", s(&csv)]);
    ok(&o);
    let l = lines(&csv);
    assert_eq!(l[0], "dz,branch,energy,model,interaction,converged");
    assert_eq!(l.len() - 1, 6 * 151);
    assert!(l[1].starts_with("0,0,"));
    let m: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("spec.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["tool"], "tisr");
    assert_eq!(m["command"], "spectrum");
    assert_eq!(m["outputs"]["rows"], 906);
    assert_eq!(m["parameters"]["dimension"], 169);
    assert_eq!(m["tolerances"]["convergence_tol"], 1e-3);
    assert!(m["units"].is_null());
}

#[test]
fn argument_errors_exit_with_two() {
    let cases: [&[&str]; 7] = [
        &["spectrum"],
        &["spectrum", "--a", "0.5", "--dz", "3:0:0.1"],
        &["spectrum", "--a", "0.5", "--basis", "0,1,1"],
        &["nonsense"],
        &["gate", "--gap", "-1", "--out", "-"],
        &["fig2", "--sign", "sideways"],
        &["busch", "--a", "1", "--atom-mass", "87"],
    ];
    for args in cases {
        let o = tisr(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = tisr_threads("zero", &["gate", "--gap", "1", "--out", "-"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("TISR_THREADS"));
}

#[test]
fn help_and_version_succeed() {
    ok(&tisr(&["--help"]));
    let v = tisr(&["--version"]);
    ok(&v);
    assert!(String::from_utf8_lossy(&v.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn rerun_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("sc.csv");
    let o = tisr_threads(
        "1",
        &["selfconsistent", "--dz", "0:3:0.5", "--basis", "shells:12", "--no-check", "--out", s(&first), "--atom-mass", "87", "--omega", "6.283e5"],
    );
    ok(&o);
    let manifest = dir.path().join("sc.manifest.json");
    let m: Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["threads"], 1);
    assert!(m["units"]["z0_metre"].as_f64().unwrap() > 0.0);
    assert!(m["parameters"]["scattering"].is_object() || m["parameters"].is_object());

    let second = dir.path().join("again.csv");
    let again = dir.path().join("again.manifest.json");
    ok(&tisr_threads("3", &["rerun", s(&manifest), "--out", s(&second), "--write-manifest", s(&again)]));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    let m2: Value = serde_json::from_str(&fs::read_to_string(&again).unwrap()).unwrap();
    assert_eq!(m2["argv"], m["argv"]);
    assert_eq!(m2["parameters"], m["parameters"]);

    let o = tisr(&["rerun", s(&manifest)]);
    ok(&o);
    assert_eq!(o.stdout, fs::read(&first).unwrap());
}

#[test]
fn rerun_rejects_foreign_files() {
    let dir = tempfile::tempdir().unwrap();
    let bogus = dir.path().join("bogus.json");
    fs::write(&bogus, "{\"tool\": \"other\"}").unwrap();
    assert_eq!(tisr(&["rerun", s(&bogus)]).status.code(), Some(2));
    assert_eq!(tisr(&["rerun", s(&dir.path().join("missing.json"))]).status.code(), Some(2));
}

#[test]
fn gate_time_for_unitarity_gap() {
    let o = tisr(&["gate", "--gap", "0.564", "--out", "-"]);
    ok(&o);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut l = text.lines();
    assert_eq!(l.next().unwrap(), "gap,period,phase");
    let row: Vec<f64> = l.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[1] - 2.0 * std::f64::consts::PI / 0.564).abs() < 1e-9);
    assert!((row[2] - std::f64::consts::PI).abs() < 1e-11);
}

#[test]
fn busch_levels_at_unitarity() {
    let o = tisr(&["busch", "--a", "inf", "--count", "3", "--out", "-"]);
    ok(&o);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "index,l,E,kind");
    assert_eq!(rows.len(), 4);
    for (k, row) in rows[1..].iter().enumerate() {
        let e: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((e - (2.0 * k as f64 + 0.5)).abs() < 1e-9, "{row}");
    }
}

#[test]
fn aeff_table_over_negative_energies() {
    let o = tisr(&["aeff", "--energies", "-1:1:0.5", "--out", "-"]);
    ok(&o);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "E_K,a_eff,pole_flag");
    assert_eq!(rows.len(), 6);
    assert!(rows[3].starts_with("0,0.99"), "{}", rows[3]);
}

#[test]
fn fig2_carries_first_order_column() {
    let o = tisr(&["fig2", "--sign", "negative", "--dz", "0:1:0.5", "--branches", "2", "--no-check", "--out", "-"]);
    ok(&o);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0].last(), Some(&"perturbative"));
    assert_eq!(rows.len(), 1 + 2 * 3);
    let first: f64 = rows[1][6].parse().unwrap();
    assert!((first - (1.5 - 1.0 / std::f64::consts::PI.sqrt())).abs() < 1e-11);
    assert_eq!(rows[1][4], "-0.5");
}

#[test]
fn crossing_rows_leave_missing_values_empty() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let json = dir.path().join("x.json");
    let o = tisr(&["crossing", "--a", "-0.5,1", "--dz", "0:3.5:0.05", "--out", s(&csv), "--json", s(&json)]);
    ok(&o);
    let l = lines(&csv);
    assert_eq!(l[0], "a,dz_res_estimate,dz_res_located,gap,gap_variational");
    assert_eq!(l[1], "-0.5,,,,");
    let row: Vec<f64> = l[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[1], 2.0);
    assert!((row[2] - 2.0).abs() < 0.2 && row[3] > 0.0 && row[4] >= row[3]);
    let j: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(j[0]["crossing"].is_null());
    assert!(j[1]["crossing"]["curvature"].as_f64().unwrap() > 0.0);
}

#[test]
fn variational_and_perturbation_tables() {
    let v = tisr(&["variational", "--a", "0.5", "--dz", "1:2:0.5", "--out", "-"]);
    ok(&v);
    let text = String::from_utf8(v.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    for row in text.lines().skip(1) {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[3] - (f[2] - f[1])).abs() < 1e-9);
    }
    let p = tisr(&["perturbation", "--a", "0.5", "--dz", "0", "--out", "-"]);
    ok(&p);
    assert_eq!(String::from_utf8(p.stdout).unwrap().lines().nth(1).unwrap(), "0,0.564189583548,2.06418958355");
}
