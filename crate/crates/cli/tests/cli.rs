use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn write_scenario(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ffstark-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn ffstark(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ffstark")).args(["--log-level", "quiet"]).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn verify_writes_canonical_report() {
    let s = write_scenario("i1.json", r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf"], "T": [[[1], [1], [0]]], "r": 0}"#);
    let report = s.with_extension("out.json");
    let (code, _) = ffstark(&["verify", s.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(code, 0);
    let first = fs::read_to_string(&report).unwrap();
    assert!(first.contains("\"content_hash\""));
    assert!(!first.contains("timings_ms"));
    ffstark(&["verify", s.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(&report).unwrap(), first);
    let (_, stdout) = ffstark(&["verify", s.to_str().unwrap()]);
    assert!(stdout.contains("timings_ms"));
}

#[test]
fn input_errors_exit_with_two() {
    let overlap = write_scenario("overlap.json", r#"{"p": 2, "a": 1, "nu": 2, "S": [[[0]]], "T": [[[0]]], "r": 0}"#);
    assert_eq!(ffstark(&["verify", overlap.to_str().unwrap()]).0, 2);
    let hyp = write_scenario("hyp.json", r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf", [[0]]], "T": [[[1]]], "r": 1}"#);
    assert_eq!(ffstark(&["verify", hyp.to_str().unwrap()]).0, 2);
    assert_eq!(ffstark(&["verify", "/nonexistent/scenario.json"]).0, 2);
}

#[test]
fn oversized_field_is_a_capacity_error() {
    let big = write_scenario("big.json", r#"{"p": 2, "a": 1, "nu": 21, "S": ["inf"], "T": [[[0]]], "r": 0}"#);
    assert_eq!(ffstark(&["verify", big.to_str().unwrap()]).0, 3);
}

#[test]
fn theta_only_for_positive_genus() {
    let s = write_scenario(
        "elliptic.json",
        r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf"], "T": [[[0]]], "r": 0, "curve_numerator": [1, 0, 2]}"#,
    );
    let (code, out) = ffstark(&["verify", s.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["theta"]["coefficients"], serde_json::json!([[1, 0], [0, 0], [2, 0]]));
    assert_eq!(v["checks"], serde_json::json!({"factorization": "pass", "theta": "pass"}));
}

#[test]
fn small_sweep_from_the_command_line() {
    let (code, out) = ffstark(&["sweep", "--p", "3", "--nu-max", "2", "--deg-max", "1", "--r-max", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["total"].as_u64().unwrap() > 0);
    assert_eq!(v["total"], v["passed"]);
}
