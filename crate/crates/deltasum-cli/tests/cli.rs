use serde_json::Value;
use std::process::{Command, Output};

fn deltasum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltasum"))
        .args(args)
        .env_remove("DELTASUM_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, text: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("deltasum-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn bad_invocations_map_to_distinct_exit_codes() {
    assert_eq!(code(&deltasum(&["verify", "gauss", "--bogus", "1"])), 3);
    assert_eq!(code(&deltasum(&["verify", "nosuch"])), 3);
    assert_eq!(code(&deltasum(&["verify", "gauss", "--qmax", "banana"])), 4);
    assert_eq!(code(&deltasum(&["fit"])), 5);
    assert_eq!(code(&deltasum(&["verify", "gauss", "--tolerance", "-1"])), 6);
    assert_eq!(code(&deltasum(&["sieve", "--threads", "0"])), 6);
}

#[test]
fn passing_suite_reports_consistently_with_exit_zero() {
    let out = deltasum(&["verify", "gauss", "--qmax", "40"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rows = v["result"]["assertions"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["pass"] == Value::Bool(true)));
    assert_eq!(v["result"]["summary"]["failed"], 0);
    assert_eq!(v["run_id"].as_str().unwrap().len(), 16);
}

#[test]
fn failing_suite_exits_one_and_lists_the_failure() {
    let out = deltasum(&["verify", "zero-frequency", "--qmax", "40"]);
    let v = json(&out);
    let failed = v["result"]["summary"]["failed"].as_u64().unwrap();
    assert_eq!(code(&out), if failed == 0 { 0 } else { 1 });
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.matches("FAIL ").count() as u64, failed);
}

#[test]
fn runtime_cap_exits_two() {
    let out = deltasum(&["verify", "gauss", "--time-limit", "1e-9"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["result"]["aborted"], Value::Bool(true));
}

#[test]
fn flags_override_the_config_file() {
    let cfg = temp_file("cfg.json", r#"{"qmax": 500, "tolerance": 1e-3}"#);
    let out = deltasum(&["verify", "gauss", "--config", cfg.to_str().unwrap(), "--qmax", "30"]);
    assert_eq!(code(&out), 0);
    let config = &json(&out)["config"];
    assert_eq!(config["qmax"], 30);
    assert_eq!(config["tolerance"].as_f64(), Some(1e-3));

    let unknown = temp_file("unknown.json", r#"{"qmux": 1}"#);
    assert_eq!(code(&deltasum(&["verify", "gauss", "--config", unknown.to_str().unwrap()])), 3);
    let typed = temp_file("typed.json", r#"{"qmax": "many"}"#);
    assert_eq!(code(&deltasum(&["verify", "gauss", "--config", typed.to_str().unwrap()])), 4);
}

#[test]
fn same_config_gives_identical_bytes() {
    let args = ["sum", "--xs", "64,128", "--source", "d3", "--format", "csv"];
    let one = deltasum(&[&args[..], &["--threads", "1"]].concat());
    let two = Command::new(env!("CARGO_BIN_EXE_deltasum")).args(args).env("DELTASUM_THREADS", "1").output().unwrap();
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, two.stdout);
    let a = deltasum(&["expsum", "--q", "21", "--m1", "2", "--m2", "-5"]);
    let b = deltasum(&["expsum", "--q", "21", "--m1", "2", "--m2", "-5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sieve_csv_has_the_documented_columns() {
    let out = deltasum(&["sieve", "--limit", "12", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,d,d3,mu,phi,von_mangoldt"));
    let twelve: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(&twelve[..5], &["12", "6", "18", "0", "4"]);
}

#[test]
fn fit_recovers_a_power_law() {
    let series = temp_file("series.csv", "X,value\n10,1000\n20,8000\n40,64000\n");
    let out = deltasum(&["fit", "--series", series.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let slope = json(&out)["result"]["slope"].as_f64().unwrap();
    assert!((slope - 3.0).abs() < 1e-12);
}
