use std::path::Path;
use std::process::{Command, Output};

use seiscontrol::bundle::verify_bundle;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seiscontrol"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(cwd)
        .env_remove("SEISCONTROL_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SHORT: &str = "mode = \"scenario1\"\n[time]\nstart = \"1989-01\"\nend = \"1994-12\"\n";

#[test]
fn simulate_writes_verifiable_bundles() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.toml"), SHORT).unwrap();
    let o = run(
        &["simulate", "--config", "short.toml", "--seed", "7", "--out-dir", "b"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let b = dir.path().join("b");
    for f in ["catalog.csv", "timeseries.csv", "controller_log.csv", "manifest.json"] {
        assert!(b.join(f).exists(), "{f}");
    }
    assert!(verify_bundle(&b).unwrap().is_empty());
    let manifest = std::fs::read_to_string(b.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 7"));

    let o = run(&["catalog-stats", "b/catalog.csv", "--mc", "1.0"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("b_hat"));
    let table = std::fs::read_to_string(b.join("exceedance.csv")).unwrap();
    assert!(table.starts_with("magnitude,n_exceeding\n1.000,"));
}

#[test]
fn ensemble_runs_get_their_own_directories() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.toml"), SHORT).unwrap();
    let o = bin()
        .args([
            "simulate",
            "--config",
            "short.toml",
            "--mode",
            "no-control",
            "--runs",
            "2",
        ])
        .current_dir(dir.path())
        .env("SEISCONTROL_OUT_DIR", "env_out")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("env_out");
    assert!(out.join("run_000/catalog.csv").exists());
    assert!(out.join("run_001/catalog.csv").exists());
    assert!(!out.join("run_000/controller_log.csv").exists());
    let ens = std::fs::read_to_string(out.join("ensemble.csv")).unwrap();
    assert_eq!(ens.lines().count(), 1 + 72);
}

#[test]
fn sweep_deduplicates_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.toml"), SHORT).unwrap();
    let o = run(
        &["sweep", "k3", "10,36.05,10", "--config", "short.toml", "--out-dir", "."],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("duplicate"));
    let table = std::fs::read_to_string(dir.path().join("sweep_k3.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.starts_with("k3,extracted_volume_m3,total_events"));

    let o = run(
        &["sweep", "dtc", "1,3", "--config", "short.toml", "--out-dir", "."],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let table = std::fs::read_to_string(dir.path().join("sweep_dtc.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn synth_then_simulate_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["synth", "--out-dir", "data"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg = dir.path().join("data/scenario.toml");
    let text = std::fs::read_to_string(&cfg).unwrap();
    let text = text
        .replace("start = \"1965-10\"", "start = \"1989-01\"")
        .replace("end = \"2023-01\"", "end = \"1993-12\"");
    std::fs::write(&cfg, text).unwrap();
    let o = run(
        &[
            "simulate",
            "--config",
            "data/scenario.toml",
            "--mode",
            "scenario2",
            "--out-dir",
            "s2",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = std::fs::read_to_string(dir.path().join("s2/manifest.json")).unwrap();
    assert!(manifest.contains("wells.csv"));
}

#[test]
fn exit_codes_follow_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("typo.toml"), "[control]\nk4 = 1.0\n").unwrap();
    std::fs::write(p.join("period.toml"), "[time]\ncontrol_period_hr = 100.0\n").unwrap();
    std::fs::write(p.join("empty.csv"), "time_iso,t_hr,x_km,y_km,magnitude,cell\n").unwrap();

    let o = run(&["simulate", "--config", "typo.toml"], p);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k4"));
    assert_eq!(run(&["sweep", "gamma", "1"], p).status.code(), Some(2));
    let o = run(&["simulate", "--config", "period.toml"], p);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("control_period_hr"));
    assert_eq!(run(&["catalog-stats", "empty.csv"], p).status.code(), Some(5));
    assert_eq!(run(&["simulate", "--config", "missing.toml"], p).status.code(), Some(6));
}
