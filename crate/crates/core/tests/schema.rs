mod common;

use serde_json::json;

#[test]
fn every_subcommand_emits_a_valid_report() {
    let v = common::validator();
    for args in common::EVERY_SUBCOMMAND {
        let (code, out, err) = common::run(args);
        assert_eq!(code, 0, "{args:?}: {err}");
        let errs = common::violations(&v, &out);
        assert!(errs.is_empty(), "{args:?}: {errs:?}");
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let v = common::validator();
    let (_, out, _) = common::run(&["abc", "--a", "1", "--b", "8"]);
    let mut report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.is_valid(&report));
    report["result"]["primes"] = json!([2, 3]);
    assert!(!v.is_valid(&report));
    report["result"]["primes"] = json!(["2", "3"]);
    report["version"] = json!(2);
    assert!(!v.is_valid(&report));
    report["version"] = json!(1);
    report["command"] = json!("orbit");
    assert!(!v.is_valid(&report));
}
