use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_equilattice"));
    c.env_remove("EQUILATTICE_OUT");
    c
}

fn run_config(dir: &Path, json: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, json).unwrap();
    let out = dir.join("out");
    bin().arg("run").arg(&cfg).arg("--out").arg(&out).args(extra).output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

#[test]
fn presets_are_listed() {
    let o = bin().arg("presets").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() > 5);
    assert!(text.contains("sl2xsl2-diagonal"));
    assert!(text.contains("A2+Z2"));
}

#[test]
fn minimal_multiplicity_run() {
    let d = tempfile::tempdir().unwrap();
    let o = run_config(d.path(), r#"{"kind": "multiplicity", "r": 2, "K": 100}"#, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(d.path(), "bk.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,b_k,hnf_count"));
    // b_k = σ_1(k) for r = 2
    assert_eq!(lines.nth(5), Some("6,12,12"));
    assert_eq!(csv.lines().count(), 101);
    let side: Value = serde_json::from_str(&read(d.path(), "bk.meta.json")).unwrap();
    assert_eq!(side["meta"]["parameters"]["K"], 100);
    assert!(side["meta"].get("seed").is_some());
    let report: Value = serde_json::from_str(&read(d.path(), "report.json")).unwrap();
    assert_eq!(report["assertions"][0]["passed"], true);
    assert!(report["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn unknown_preset_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run_config(d.path(), r#"{"kind": "sublattices", "lattice": "E9", "r": 1, "totals": [10]}"#, &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("`lattice`") && err.contains("E9"), "{err}");
    assert!(!d.path().join("out").exists());
}

#[test]
fn malformed_configs_exit_1() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_config(d.path(), "{not json", &[]).status.code(), Some(1));
    assert_eq!(run_config(d.path(), r#"{"kind": "cm", "N_set": [1], "bogus": 1}"#, &[]).status.code(), Some(1));
    let o = run_config(d.path(), r#"{"kind": "pullpush", "preset": "so22-weight2"}"#, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("`seed`"));
    let missing = bin().args(["run", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn cm_level_one_has_i_and_rho() {
    let d = tempfile::tempdir().unwrap();
    let o = run_config(d.path(), r#"{"kind": "cm", "N_set": [1], "regions": "default"}"#, &[]);
    assert_eq!(o.status.code(), Some(0));
    let csv = read(d.path(), "cm_points.csv");
    assert_eq!(csv.lines().next(), Some("N,t,D,x,y,weight"));
    assert!(csv.contains("1,0,-4,0,1,0.5"));
    assert!(csv.contains("1,1,-3,-0.5,0.8660254037844386,0.3333333333333333"));
    for f in ["cm_points", "cm_regions", "cm_aggregate"] {
        assert!(d.path().join("out").join(format!("{f}.meta.json")).exists(), "{f}");
    }
}

#[test]
fn failed_assertion_exits_2_after_writing() {
    let d = tempfile::tempdir().unwrap();
    let o = run_config(d.path(), r#"{"kind": "cm", "N_set": [5, 6], "points": false, "tolerance": 0.0}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL region_ratios_agree"));
    let report: Value = serde_json::from_str(&read(d.path(), "report.json")).unwrap();
    assert_eq!(report["assertions"][0]["passed"], false);
}

#[test]
fn output_directory_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.json");
    std::fs::write(&cfg, r#"{"kind": "multiplicity", "r": 1, "K": 5}"#).unwrap();
    let target = d.path().join("from-env");
    let o = bin().env("EQUILATTICE_OUT", &target).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(target.join("bk.csv").exists());
}

#[test]
fn seeded_runs_reproduce_bytes_across_thread_counts() {
    let cfg = r#"{"kind": "sublattices", "lattice": "Z3", "r": 1, "seed": 1, "samples": 20000, "n_grid": [50, 100],
                  "windows": [{"id": "w", "kind": "cap", "center": [1, 0, 0], "half_angle": 0.9}]}"#;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run_config(a.path(), cfg, &["--seed", "77", "--threads", "1"]).status.code(), Some(0));
    assert_eq!(run_config(b.path(), cfg, &["--seed", "77", "--threads", "2"]).status.code(), Some(0));
    for f in ["convergence.csv", "convergence.meta.json", "shells.csv", "shells.meta.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
    let side: Value = serde_json::from_str(&read(a.path(), "convergence.meta.json")).unwrap();
    assert_eq!(side["meta"]["seed"], 77);
    let c = tempfile::tempdir().unwrap();
    assert_eq!(run_config(c.path(), cfg, &["--seed", "78"]).status.code(), Some(0));
    assert_ne!(read(a.path(), "convergence.csv"), read(c.path(), "convergence.csv"));
}
