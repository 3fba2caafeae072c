use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bregman(args: &[&str]) -> Output {
    bregman_with_env(args, None)
}

fn bregman_with_env(args: &[&str], config: Option<&PathBuf>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bregman"));
    cmd.args(args).env_remove("BREGMAN_CONFIG");
    if let Some(p) = config {
        cmd.env("BREGMAN_CONFIG", p);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

#[test]
fn left_center_of_entropy_segment_is_the_midpoint() {
    let o = bregman(&[
        "center",
        "--side",
        "left",
        "--fn",
        "entropy",
        "--set",
        r#"{"segment":{"c0":[1,3],"c1":[3,1]}}"#,
    ]);
    let v = stdout_json(&o);
    assert_eq!(v["center"], serde_json::json!([2.0, 2.0]));
    assert!(v["certificate"]["residual"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn neglog_distance() {
    let v = stdout_json(&bregman(&[
        "distance", "--fn", "neglog", "--x", "1", "--y", "2",
    ]));
    let d = v["distance"].as_f64().unwrap();
    assert!((d - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-11);
}

#[test]
fn distance_outside_the_domain_is_infinite() {
    let v = stdout_json(&bregman(&[
        "distance", "--fn", "entropy", "--x", "-1", "--y", "2",
    ]));
    assert_eq!(v["distance"], "inf");
}

#[test]
fn step_function_chebyshev_point() {
    let v = stdout_json(&bregman(&[
        "proxpoint",
        "--g",
        "step01",
        "--mu",
        "1",
        "--op",
        "cheb",
    ]));
    assert_eq!(v["point"].as_f64().unwrap(), 0.25);
    let v = stdout_json(&bregman(&[
        "proxpoint",
        "--g",
        "step01",
        "--mu",
        "0.1",
        "--op",
        "cheb",
    ]));
    assert_eq!(v["point"].as_f64().unwrap(), 0.4);
}

#[test]
fn indicator_farthest_map_ties_at_the_midpoint() {
    let v = stdout_json(&bregman(&[
        "proxpoint",
        "--g",
        r#"{"indicator":[0,1]}"#,
        "--mu",
        "1",
        "--op",
        "Q",
        "--x",
        "0.5",
    ]));
    assert_eq!(v["points"], serde_json::json!([0.0, 1.0]));
    assert_eq!(v["ties"], true);
}

#[test]
fn farthest_points_of_a_segment() {
    let v = stdout_json(&bregman(&[
        "farthest",
        "--fn",
        "energy",
        "--set",
        r#"{"segment":{"c0":[1,3],"c1":[3,1]}}"#,
        "--point",
        "2,2",
    ]));
    assert_eq!(v["value"].as_f64().unwrap(), 1.0);
    assert_eq!(v["attainers"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    let o = bregman(&["center", "--fn", "entropy", "--set", "{not json"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "parse");
    assert_eq!(e["error"]["field"], "--set");

    let o = bregman(&[
        "center",
        "--fn",
        "entropy",
        "--set",
        r#"{"interval":[-1,2]}"#,
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let o = bregman(&["proxpoint", "--g", "q", "--mu", "0.5", "--op", "cheb"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"]["kind"], "domain");

    let o = bregman(&[
        "project",
        "--fn",
        "entropy",
        "--set",
        r#"{"interval":[1,2]}"#,
        "--point",
        "-1",
    ]);
    assert_eq!(o.status.code(), Some(3));

    let o = bregman(&[
        "center",
        "--fn",
        "entropy",
        "--set",
        r#"{"finite":[[1,1],[4,1.5],[2,5]]}"#,
        "--side",
        "right",
        "--max-iter",
        "0",
        "--certificate-tol",
        "1e-300",
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    assert_eq!(stderr_json(&o)["error"]["kind"], "nonconvergence");

    let o = bregman(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_json(&o)["error"]["message"].is_string());
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "probe",
        "--kind",
        "scan",
        "--fn",
        "entropy",
        "--set",
        r#"{"finite":[[1,1],[4,1.5],[2,5]]}"#,
        "--grid",
        r#"{"lo":[0.5,0.5],"hi":[6,6],"resolution":20}"#,
    ];
    let a = bregman(&args);
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "1"]);
    let b = bregman(&with_jobs);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["non_increasing"], true);
}

#[test]
fn csv_grid_has_versioned_columns() {
    let o = bregman(&[
        "probe",
        "--kind",
        "chebyshev",
        "--fn",
        "energy",
        "--set",
        r#"{"finite":[[0],[2]]}"#,
        "--grid",
        r#"{"lo":[-1],"hi":[3],"resolution":5}"#,
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("version,map,index,coords,value,tied"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[2], "1,left_nearest,2,1,0.5,true");
}

#[test]
fn klee_probe_reports_the_center_witness() {
    let v = stdout_json(&bregman(&[
        "probe",
        "--kind",
        "klee",
        "--fn",
        "neglog",
        "--set",
        r#"{"interval":[1,2]}"#,
        "--grid",
        r#"{"lo":[0.5],"hi":[3],"resolution":11}"#,
    ]));
    let w = v["witnesses"][0]["point"][0].as_f64().unwrap();
    assert!((w - 1.0 / std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("bregman-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.json");
    // a huge tie tolerance turns every query into a tie
    std::fs::write(&path, r#"{"tie_tol": 100.0}"#).unwrap();
    let args = [
        "project",
        "--fn",
        "energy",
        "--set",
        r#"{"finite":[[0],[2]]}"#,
        "--point",
        "0.2",
    ];
    let v = stdout_json(&bregman_with_env(&args, Some(&path)));
    assert_eq!(v["ties"], true);
    let mut flagged = args.to_vec();
    flagged.extend(["--tie-tol", "1e-9"]);
    let v = stdout_json(&bregman_with_env(&flagged, Some(&path)));
    assert_eq!(v["ties"], false);

    std::fs::write(&path, r#"{"tie_tolerance": 1}"#).unwrap();
    let o = bregman_with_env(&args, Some(&path));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["field"], "BREGMAN_CONFIG");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn selftest_prints_a_passing_table() {
    let o = bregman(&["selftest", "--format", "table"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(
        text.lines().filter(|l| l.contains(" PASS ")).count(),
        10,
        "{text}"
    );
}
