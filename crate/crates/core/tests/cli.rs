mod common;

use std::process::Command;

use common::run;
use serde_json::Value;

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn zsigmondy_for_x2_plus_1_is_empty() {
    let v = json(&["zsigmondy", "--map", "x^2+1", "--alpha", "1", "--max-n", "10"]);
    assert_eq!(v["result"]["zsigmondy_set"], serde_json::json!([]));
    assert_eq!(v["result"]["records"][4]["primitive_part"], "45833");
}

#[test]
fn galois_tower_certifies_a_equals_1() {
    let v = json(&["galois-tower", "--a", "1", "--max-n", "4"]);
    let recs = v["result"]["records"].as_array().unwrap();
    assert_eq!(recs.len(), 5);
    assert!(recs.iter().all(|r| r["status"] == "certified"));
}

#[test]
fn mason_reports_the_tight_example() {
    let v = json(&["mason", "--a", "t^2+2t", "--b", "1"]);
    assert_eq!(v["result"]["tight"], true);
    assert_eq!(v["result"]["c"], "t^2+2*t+1");
}

#[test]
fn negative_arguments_are_accepted() {
    let v = json(&["galois-tower", "--a", "-5", "--max-n", "1"]);
    assert_eq!(v["result"]["records"][1]["status"], "no_certificate_found");
    let v = json(&["orbit", "--map", "x^2-1", "--alpha", "-1", "--max-n", "3"]);
    assert_eq!(v["result"]["values"], serde_json::json!(["0"]));
    assert_eq!(v["result"]["termination"]["kind"], "hit_zero");
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["orbit", "--map", "x^2+", "--alpha", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("position 4"), "{err}");
    assert_eq!(run(&["no-such-command"]).0, 1);
    assert_eq!(run(&["orbit", "--map", "x^2"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["orbit", "--map", "(x^2-1)/(x-1)", "--alpha", "1"]).0, 1);
    let (code, _, err) = run(&["orbit", "--map", "x^5000", "--alpha", "2"]);
    assert_eq!(code, 1, "{err}");
    let (code, _, err) = run(&["galois-tower", "--a", "1", "--max-n", "80"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn output_is_independent_of_the_worker_count() {
    let args = ["zsigmondy", "--map", "x^2+3", "--alpha", "1/2", "--max-n", "8"];
    let (_, one, _) = run(&[&args[..], &["--jobs", "1"]].concat());
    let (_, four, _) = run(&[&args[..], &["--jobs", "4"]].concat());
    let (_, default, _) = run(&args);
    assert_eq!(one, four);
    assert_eq!(one, default);
}

#[test]
fn table_and_csv_formats() {
    let (code, out, _) = run(&["orbit", "--map", "x^2+1", "--alpha", "1", "--max-n", "3", "--format", "table"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("orbit (dynzsig-report v1)"));
    let (_, out, _) = run(&["roth-scan", "--poly", "x^3+2", "--height-bound", "2", "--format", "csv"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("height,lower_bound_only,margin,radsum,z"));
    assert_eq!(out.lines().count(), 1 + 7);
    assert!(!out.contains("-0.0"));
}

#[test]
fn over_qt_the_q_only_commands_refuse() {
    let (code, _, err) = run(&["classify", "--field", "qt", "--map", "x^2+t", "--alpha", "t"]);
    assert_eq!(code, 1);
    assert!(err.contains("only available over Q"));
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_dynzsig"))
        .args(["abc", "--a", "3", "--b", "125"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["result"]["quality"].as_f64().unwrap() - 1.4266).abs() < 1e-4);
    let out = Command::new(env!("CARGO_BIN_EXE_dynzsig")).args(["height"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dynzsig"))
        .args(["zsigmondy", "--map", "x^2+1", "--alpha", "1", "--max-n", "4"])
        .env("DYNZSIG_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
}

#[test]
fn empty_sums_are_positive_zero() {
    let (code, out, _) = run(&["prop-old", "--map", "x^2+1", "--alpha", "1", "--factor", "x^2+1", "--max-n", "6"]);
    assert_eq!(code, 0);
    assert!(!out.contains("-0.0"), "{out}");
}
