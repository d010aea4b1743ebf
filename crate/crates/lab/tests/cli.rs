use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use isodrast_lab::config::DEFAULT_CONFIG;
use serde_json::{json, Value};

fn isodrast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isodrast")).args(args).output().expect("binary runs")
}

fn default_json() -> Value {
    serde_json::from_str(DEFAULT_CONFIG).unwrap()
}

fn write_config(dir: &Path, config: &Value) -> String {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

/// The `(x₁, y₁)`-plane unit circle, whose `∮ y dx` is `−π`.
fn disc_config() -> Value {
    let mut config = default_json();
    config["manifold"]["density"] = json!([]);
    config["embedding"] = json!([
        { "terms": [[1, 1.0, 0.0]] },
        { "terms": [[1, 0.0, 1.0]] },
        {},
        {}
    ]);
    config
}

#[test]
fn check_output_is_byte_identical_for_a_seed() {
    let a = isodrast(&["check", "--seed", "7"]);
    let b = isodrast(&["check", "--seed", "7"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains(&b'\r'));
    let c = isodrast(&["check", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn every_record_carries_provenance_and_oracle() {
    let out = isodrast(&["check"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut names = vec![];
    for line in text.lines() {
        let r: Value = serde_json::from_str(line).unwrap();
        assert!(["PAPER", "TRIVIAL", "DERIVED"].contains(&r["provenance"].as_str().unwrap()));
        assert!(!r["oracle"].as_str().unwrap().is_empty());
        assert_eq!(r["pass"].as_bool().unwrap(), r["residual"].as_f64().unwrap() <= r["tolerance"].as_f64().unwrap());
        names.push(r["name"].as_str().unwrap().to_string());
    }
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), isodrast_lab::checks::check_names().len());
}

#[test]
fn non_integer_volume_with_quotient_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = default_json();
    config["manifold"]["total_volume"] = json!(1.5);
    let path = write_config(dir.path(), &config);
    let out = isodrast(&["check", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("manifold.total_volume") && err.contains("integer"), "{err}");
    // without the quotient the same volume is fine
    config["experiments"]["berry"]["quotient"] = json!(false);
    let path = write_config(dir.path(), &config);
    let out = isodrast(&["run", "momenta", "--config", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn schema_errors_report_line_or_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{\n  \"ambient\": { \"kind\": \"euclidean\", \"m\": 2 },\n  \"manifold\": 3\n}\n").unwrap();
    let out = isodrast(&["check", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let mut config = default_json();
    config["integrator"]["dt"] = json!(-0.1);
    let out = isodrast(&["check", "--config", &write_config(dir.path(), &config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("integrator.dt"), "{}", stderr(&out));

    let mut config = default_json();
    config["experiments"]["omega0"]["pairs"] = json!([["shear", "nope"]]);
    let out = isodrast(&["run", "omega0", "--config", &write_config(dir.path(), &config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("experiments.omega0.pairs[0][1]"), "{}", stderr(&out));
}

#[test]
fn unknown_or_unconfigured_experiments_are_rejected() {
    let out = isodrast(&["run", "holonomy"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("holonomy"));

    let dir = tempfile::tempdir().unwrap();
    let mut config = default_json();
    config["experiments"].as_object_mut().unwrap().remove("flow");
    let out = isodrast(&["run", "flow", "--config", &write_config(dir.path(), &config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("experiments.flow"));
}

#[test]
fn berry_sweep_writes_three_rows_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = default_json();
    config["experiments"]["berry"]["eps"] = json!([0.05, 0.1, 0.2]);
    let path = write_config(dir.path(), &config);
    let out_dir = dir.path().join("out");
    let out = isodrast(&["run", "berry", "--config", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&out_dir.join("berry.csv"));
    assert_eq!(header, ["eps", "holonomy_angle", "flux_oracle", "rel_error"]);
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let eps: f64 = row[0].parse().unwrap();
        let angle: f64 = row[1].parse().unwrap();
        let rel: f64 = row[3].parse().unwrap();
        assert!(rel < 0.05, "{row:?}");
        // sheared translation family: ω₀-flux is ε² + ε³/2 for a = 1
        assert!((angle - (eps * eps + eps.powi(3) / 2.0)).abs() < 1e-10, "{row:?}");
    }
    assert!(out_dir.join("berry.jsonl").exists());
}

#[test]
fn zero_duration_flow_has_one_row_and_no_drift() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = default_json();
    config["experiments"]["flow"]["schedule"] = json!([{ "hamiltonian": "shear", "duration": 0.0 }]);
    let path = write_config(dir.path(), &config);
    let out_dir = dir.path().join("out");
    let out = isodrast(&["run", "flow", "--config", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&out_dir.join("flow.csv"));
    assert_eq!(rows.len(), 1);
    let drift = header.iter().position(|c| c == "drift").unwrap();
    assert_eq!(rows[0][drift], "0");
    assert_eq!(rows[0][0], "0");
}

#[test]
fn momenta_on_the_disc_circle_gives_minus_pi() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &disc_config());
    let out_dir = dir.path().join("out");
    let out = isodrast(&["run", "momenta", "--config", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, rows) = read_csv(&out_dir.join("momenta.csv"));
    let row = rows.iter().find(|r| r[0] == "jr_ex").unwrap();
    let value: f64 = row[2].parse().unwrap();
    let green: f64 = row[3].parse().unwrap();
    assert!((value + PI).abs() < 1e-12 && (green + PI).abs() < 1e-10, "{row:?}");
}

#[test]
fn lift_of_a_non_exact_loop_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &disc_config());
    let out = isodrast(&["run", "lift", "--config", &path, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), isodrast_lab::records::RECORD_COLUMNS.join(","));
    let row = lines.next().unwrap();
    assert!(row.starts_with("lift.exactness,3.14159") && row.contains("false"), "{row}");
}

#[test]
fn timing_is_opt_in() {
    let out = isodrast(&["run", "omega0"]);
    assert!(!String::from_utf8_lossy(&out.stdout).contains("runtime_ms"));
    let out = isodrast(&["run", "omega0", "--timing"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("runtime_ms"));
}
