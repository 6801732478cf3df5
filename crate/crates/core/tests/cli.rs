//! Config files, manifests, CSV artifacts and exit codes.

use std::fs;
use std::path::Path;

use radscatter::cli::{cmd_certify, cmd_report, cmd_scatter, cmd_simulate, cmd_sweep, main_with, RunConfig};

fn small(output: &Path, extra: &str) -> RunConfig {
    let text = format!(
        r#"
output = "{}"

[scenario]
n = 5
p = 1.9
k = 2.3
kappa = 2.5
eps = 1e-3
v0 = 1e-3

[solver]
dr = 0.25
t_min = -30.0
t_max = 30.0
snapshot_every = 32
snapshot_stride = 8

[fit]
t_lo = 2.0
t_hi = 30.0
{extra}
"#,
        output.display()
    );
    RunConfig::from_toml_str(&text).unwrap()
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn config_round_trips_through_toml() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "[sweep]\np = [1.85, 1.9]\n");
    let again = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(cfg, again);
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let good = small(dir.path(), "").to_toml_string();
    let bad = good.replace("[solver]", "[solver]\nstep = 0.1");
    let err = RunConfig::from_toml_str(&bad).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("step"), "{err}");
}

#[test]
fn shipped_configs_parse() {
    for entry in fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/configs")).unwrap() {
        let p = entry.unwrap().path();
        RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn scatter_is_deterministic_across_output_dirs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = cmd_scatter(&small(a.path(), "")).unwrap();
    let rb = cmd_scatter(&small(b.path(), "")).unwrap();
    assert_eq!(ra.exit_code, 0);
    assert_eq!(
        fs::read(a.path().join("decay.csv")).unwrap(),
        fs::read(b.path().join("decay.csv")).unwrap()
    );
    let (ma, mb) = (read_json(&ra.manifest_path), read_json(&rb.manifest_path));
    assert_eq!(ma["config_sha256"], mb["config_sha256"]);
    assert_eq!(ma["results"], mb["results"]);
    assert_eq!(ma["artifacts"], mb["artifacts"]);
    let rate = ma["results"]["theta_hat_minus"].as_f64().unwrap();
    assert!(rate > 0.0);
}

#[test]
fn manifests_are_append_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path(), "");
    cfg.scenario.eps = 0.0;
    let first = cmd_simulate(&cfg).unwrap();
    let before = fs::read(&first.manifest_path).unwrap();
    let second = cmd_simulate(&cfg).unwrap();
    assert_eq!(first.manifest_path.file_name().unwrap(), "manifest.json");
    assert_eq!(second.manifest_path.file_name().unwrap(), "manifest.1.json");
    assert_eq!(fs::read(&first.manifest_path).unwrap(), before);
}

#[test]
fn zero_data_simulates_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path(), "");
    cfg.scenario.eps = 0.0;
    let out = cmd_simulate(&cfg).unwrap();
    assert_eq!(out.manifest.results["max_abs"].as_f64(), Some(0.0));
    let mut rdr = csv::Reader::from_path(dir.path().join("snapshots.csv")).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        assert_eq!(rec[2].parse::<f64>().unwrap(), 0.0);
        rows += 1;
    }
    assert!(rows > 0);
}

#[test]
fn invalid_scenario_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(&dir.path().join("out"), "");
    cfg.scenario.k = 1.5;
    let path = dir.path().join("bad.toml");
    fs::write(&path, cfg.to_toml_string()).unwrap();
    let code = main_with(["radscatter", "scatter", "-c", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(!dir.path().join("out").join("manifest.json").exists());
    let err = cmd_scatter(&cfg).unwrap_err();
    assert_eq!(err.kind(), "invalid_scenario");
    assert!(err.details().iter().any(|(what, _)| what == "decay-lower-bound"), "{:?}", err.details());
}

#[test]
fn missing_config_exits_with_two() {
    assert_eq!(main_with(["radscatter", "simulate", "-c", "/nonexistent/run.toml"]), 2);
    assert_eq!(main_with(["radscatter", "frobnicate"]), 2);
}

#[test]
fn certify_writes_tables_and_passes_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "[verify]\nlemmas = [\"A2\"]\nbox = 50.0\npoints = 400\nlevels = [1e-4, 1e-6, 1e-8]\ndoubling = true\n");
    let out = cmd_certify(&cfg).unwrap();
    assert_eq!(out.exit_code, 0);
    let mut rdr = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "A2");
    assert_eq!(rows[0].iter().next_back().unwrap(), "pass");
    assert!(dir.path().join("lemma_A2.csv").exists());
}

#[test]
fn sweep_records_invalid_rows_and_matches_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "[sweep]\np = [1.9, 1.5]\n");
    let out = cmd_sweep(&cfg).unwrap();
    assert_eq!(out.exit_code, 0);
    let mut rdr = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][col("valid")], "true");
    assert_eq!(&rows[1][col("valid")], "false");
    assert!(!rows[1][col("error")].is_empty());
    assert_eq!(out.manifest.results["invalid"].as_u64(), Some(1));

    let single = tempfile::tempdir().unwrap();
    let s = cmd_scatter(&small(single.path(), "")).unwrap();
    let swept: f64 = rows[0][col("theta_hat_minus")].parse().unwrap();
    assert_eq!(Some(swept), s.manifest.results["theta_hat_minus"].as_f64());
    assert_eq!(
        fs::read(dir.path().join("row_0000/decay.csv")).unwrap(),
        fs::read(single.path().join("decay.csv")).unwrap()
    );
}

#[test]
fn report_summarises_latest_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path(), "");
    cfg.scenario.eps = 0.0;
    cmd_simulate(&cfg).unwrap();
    let text = cmd_report(dir.path()).unwrap();
    assert!(text.contains("simulate"), "{text}");
    assert!(text.contains("theta=0.3"), "{text}");
    assert!(cmd_report(&dir.path().join("empty")).is_err());
}
