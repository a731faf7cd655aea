use std::fs;
use std::process::{Command, Output};

fn harvest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harvest"))
        .args(args)
        .env("HH_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn log_range_gives_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ss.csv");
    let o = harvest(&[
        "--scenario", "ss", "--vacuum", "minkowski", "--mass", "5", "--gap", "2", "--dab", "2", "--axis", "dist",
        "--range", "1:100:log:50", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], harvest_cli::output::CSV_HEADER);
    assert_eq!(lines.len(), 51);
    let first: Vec<&str> = lines[1].split(',').collect();
    let last: Vec<&str> = lines[50].split(',').collect();
    assert_eq!(first.len(), 10);
    assert!((first[0].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert!((last[0].parse::<f64>().unwrap() - 100.0).abs() < 1e-9);
    assert_eq!(first[8], "true");
    // no stray temporary files
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn unknown_preset_lists_the_available_ones() {
    let o = harvest(&["--preset", "fig42"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for name in harvest_cli::presets::names() {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn malformed_config_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, "{\n  \"scenario\": \"ss\",\n  \"mass_over_sigma\": five\n}\n").unwrap();
    let o = harvest(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3, column"), "{}", stderr(&o));
}

#[test]
fn config_file_and_jsonl_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("rows.jsonl");
    fs::write(
        &cfg,
        r#"{"scenario": "ss", "vacuum": "minkowski", "gap_over_sigma": 1, "dab_over_sigma": 2, "axis": "dab", "values": [1.5, 3.0]}"#,
    )
    .unwrap();
    let o = harvest(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["axis_value"], 3.0);
    assert_eq!(rows[0]["converged"], true);
    // farther apart, less correlated
    assert!(rows[0]["abs_m"].as_f64().unwrap() > rows[1]["abs_m"].as_f64().unwrap());
}

#[test]
fn failed_points_become_error_rows_with_status_2() {
    // Alice's support would run into the singularity at both positions
    let o = harvest(&[
        "--scenario", "fs", "--mass", "5", "--placement", "from_center", "--axis", "dist", "--values", "2,3",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.contains("NaN") && l.contains("false")), "{text}");
    assert!(stderr(&o).contains("point 2"));
}

#[test]
fn diagnose_prints_every_ladder() {
    let o = harvest(&["diagnose", "--scenario", "ss", "--vacuum", "minkowski", "--dab", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    for element in ["L_AA:", "L_BB:", "L_AB:", "M:", "E:"] {
        assert!(text.contains(element), "{element} missing:\n{text}");
    }
    assert!(text.contains("rung 1:") && text.contains("rel_change="));
}

#[test]
fn unresolved_gap_names_the_failing_rung() {
    let o = harvest(&[
        "diagnose", "--scenario", "ss", "--vacuum", "minkowski", "--dab", "2", "--gap", "20", "--max-refinements", "1",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.contains("did not converge for L_AA"), "{text}");
    assert!(text.contains("diagnosis: no steady trend; largest change at rung 1"), "{text}");
}

#[test]
fn linear_bias_is_reported_as_regulator_limited() {
    let o = harvest(&[
        "diagnose", "--scenario", "ss", "--vacuum", "minkowski", "--dab", "2", "--gap", "1", "--rel-tol", "1e-9",
        "--max-refinements", "2",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.contains("diagnosis: regulator-limited"), "{text}");
    assert!(text.contains("extrapolated="), "{text}");
}

#[test]
fn presets_are_listed() {
    let o = harvest(&["presets"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("fig7") && text.contains("fig9"));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_harvest"))
        .args(["presets"])
        .env("HH_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
