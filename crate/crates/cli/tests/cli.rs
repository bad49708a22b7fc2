use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rigid-points"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn vieta_check_writes_all_rows_within_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["vieta-check", "--n", "20", "--seed", "11"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut rdr = csv::Reader::from_path(tmp.path().join("rows.csv")).unwrap();
    let col = rdr.headers().unwrap().iter().position(|h| h == "max_ratio_err").unwrap();
    let errs: Vec<f64> = rdr.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
    assert_eq!(errs.len(), 100);
    assert!(errs.iter().all(|&e| e <= 1e-6));

    let rep = report(tmp.path());
    assert_eq!(rep["command"], "vieta-check");
    assert_eq!(rep["schema_version"], 1);
    assert_eq!(rep["config"]["seed"], 11);
    assert_eq!(rep["summary"]["within_1e6"], 100);
    assert!(rep["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn empty_plotdata_is_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["vieta-check", "--n", "5", "--replicas", "3"], tmp.path());
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(tmp.path().join("plotdata.csv")).unwrap(), "series,x,y,yerr\n");
}

#[test]
fn sampling_is_reproducible_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(&["sample-ginibre", "--n", "24", "--seed", "5"], dir.path());
        assert!(out.status.success());
    }
    let pa = std::fs::read(a.path().join("points-0000.json")).unwrap();
    let pb = std::fs::read(b.path().join("points-0000.json")).unwrap();
    assert_eq!(pa, pb);
    assert_eq!(
        std::fs::read(a.path().join("rows.csv")).unwrap(),
        std::fs::read(b.path().join("rows.csv")).unwrap()
    );
}

#[test]
fn thread_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(&["sample-gaf", "--n", "20", "--replicas", "4", "--threads", "1"], a.path()).status.success());
    assert!(run(&["sample-gaf", "--n", "20", "--replicas", "4", "--threads", "3"], b.path()).status.success());
    for f in ["points-0000.json", "points-0003.json", "rows.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn unknown_config_key_exits_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"version": 1, "n": 20, "degree": 4}"#).unwrap();
    let out = run(&["vieta-check", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "validation");
    assert_eq!(err["key"], "degree");
}

#[test]
fn flags_override_config_values() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 7, "seed": 1, "replicas": 2}"#).unwrap();
    let out_dir = tmp.path().join("o");
    let out = run(&["vieta-check", "--config", cfg.to_str().unwrap(), "--n", "9"], &out_dir);
    assert!(out.status.success());
    let rep = report(&out_dir);
    assert_eq!(rep["config"]["params"]["n"], 9);
    assert_eq!(rep["config"]["seed"], 1);
    assert_eq!(rep["summary"]["replicas"], 2);
}

#[test]
fn out_of_range_parameter_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["reconstruct", "--n", "10", "--k-max", "11"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["key"], "k_max");
}

#[test]
fn wrong_schema_version_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"version": 9}"#).unwrap();
    let out = run(&["vieta-check", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_chain_csv_has_coordinate_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["tolerance-mcmc", "--n", "0", "--m", "1", "--steps", "2000", "--seed", "2"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(tmp.path().join("rows.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header, ["step", "re_1", "im_1", "log_density", "accepted"]);
    assert!(rdr.records().count() > 0);
    let rep = report(tmp.path());
    assert_eq!(rep["property"], "conditional-tolerance");
}
