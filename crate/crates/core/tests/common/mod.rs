#![allow(dead_code)]

use dynzsig::cli;
use dynzsig::report::SCHEMA;
use serde_json::Value;

/// Runs the command line in process: (exit code, stdout, stderr).
pub fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dynzsig").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(SCHEMA).expect("schema parses");
    jsonschema::validator_for(&schema).expect("schema compiles")
}

/// Schema violations of a JSON report, one message per error.
pub fn violations(v: &jsonschema::Validator, report: &str) -> Vec<String> {
    let inst: Value = match serde_json::from_str(report) {
        Ok(v) => v,
        Err(e) => return vec![format!("not JSON: {e}")],
    };
    v.iter_errors(&inst).map(|e| format!("{} at {}", e, e.instance_path)).collect()
}

/// One invocation of every subcommand, over both fields where available.
pub const EVERY_SUBCOMMAND: &[&[&str]] = &[
    &["orbit", "--map", "x^2+1", "--alpha", "1", "--max-n", "5"],
    &["orbit", "--map", "x^2-1", "--alpha", "0", "--max-n", "4"],
    &["orbit", "--field", "qt", "--map", "x^2+t", "--alpha", "t", "--max-n", "3"],
    &["zsigmondy", "--map", "x^2+1", "--alpha", "1", "--max-n", "8"],
    &["zsigmondy", "--map", "x^2", "--alpha", "2", "--max-n", "6"],
    &["zsigmondy", "--map", "(x-1)^2", "--alpha", "3", "--max-n", "6"],
    &["zsigmondy", "--map", "x^2-2x", "--alpha", "2", "--max-n", "4"],
    &["zsigmondy", "--field", "qt", "--map", "x^2+t", "--alpha", "t", "--max-n", "4"],
    &["height", "3/4"],
    &["height", "inf"],
    &["height", "1", "8", "9"],
    &["height", "--field", "qt", "(t^2+1)/(t-3)"],
    &["canonical-height", "--map", "x^2+1", "--alpha", "1", "--tol", "1e-3"],
    &["classify", "--map", "x^2-1", "--alpha", "0"],
    &["classify", "--map", "x^2+1", "--alpha", "1"],
    &["map-analyze", "--map", "(2x^2+1)/(x^2+3)"],
    &["map-analyze", "--map", "x^2+1/2", "--depth", "2"],
    &["prop-old", "--map", "x^2+1", "--alpha", "1", "--factor", "x^2+1", "--max-n", "6"],
    &["abc", "--a", "1", "--b", "8"],
    &["abc", "--a", "-1/2", "--b", "3/2"],
    &["roth-scan", "--poly", "x^3+2", "--height-bound", "6"],
    &["roth-scan", "--field", "qt", "--poly", "x^3-t", "--max-degree", "1", "--coeff-bound", "1"],
    &["mason", "--a", "t^2+2t", "--b", "1"],
    &["galois-tower", "--a", "1", "--max-n", "4"],
    &["galois-tower", "--a", "-5", "--max-n", "2"],
];
