mod common;

use std::fs;

use dynzsig::arith::parse_ext_rational;
use dynzsig::cache::{load, zsigmondy_cached, CacheRecord};
use dynzsig::error::Error;
use dynzsig::map::RationalMap;
use dynzsig::zsigmondy::{zsigmondy_report, ZsigmondyConfig};

fn cfg(max_n: u32) -> ZsigmondyConfig {
    ZsigmondyConfig {
        max_n,
        ..Default::default()
    }
}

fn setup() -> (RationalMap, dynzsig::arith::ExtRational) {
    (RationalMap::parse("x^2+1").unwrap(), parse_ext_rational("1").unwrap())
}

#[test]
fn resume_equals_fresh() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let (m, a) = setup();
    zsigmondy_cached(&m, &a, &cfg(5), &path).unwrap();
    let resumed = zsigmondy_cached(&m, &a, &cfg(10), &path).unwrap();
    let fresh = zsigmondy_report(&m, &a, &cfg(10)).unwrap();
    assert_eq!(serde_json::to_string(&resumed).unwrap(), serde_json::to_string(&fresh).unwrap());
    assert_eq!(load(&path, &m, &a, cfg(10).budget).unwrap().len(), 10);
}

fn tamper(edit: impl Fn(&mut CacheRecord), line: usize) -> Error {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let (m, a) = setup();
    zsigmondy_cached(&m, &a, &cfg(5), &path).unwrap();
    let mut lines: Vec<String> = fs::read_to_string(&path).unwrap().lines().map(String::from).collect();
    let mut rec: CacheRecord = serde_json::from_str(&lines[line - 1]).unwrap();
    edit(&mut rec);
    lines[line - 1] = serde_json::to_string(&rec).unwrap();
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    load(&path, &m, &a, cfg(5).budget).unwrap_err()
}

#[test]
fn tampered_numerator_names_the_line() {
    match tamper(|r| r.numer += 1, 3) {
        Error::Cache { line: 3, .. } => {}
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn tampered_factor_data_is_rejected() {
    let e = tamper(
        |r| {
            let f = r.factor_data.as_mut().unwrap();
            f.prime_powers[0].exponent += 1;
        },
        4,
    );
    assert!(matches!(e, Error::Cache { line: 4, .. }), "{e:?}");
}

#[test]
fn foreign_map_hash_is_refused() {
    let e = tamper(|r| r.map_hash = "0".repeat(64), 1);
    assert!(e.to_string().contains("refusing to resume"), "{e}");
}

#[test]
fn garbage_and_gaps_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let (m, a) = setup();
    zsigmondy_cached(&m, &a, &cfg(4), &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.remove(1);
    fs::write(&path, lines.join("\n")).unwrap();
    assert!(matches!(load(&path, &m, &a, 2_000_000), Err(Error::Cache { line: 2, .. })));
    fs::write(&path, format!("{}\nnot json\n", text.lines().next().unwrap())).unwrap();
    assert!(matches!(load(&path, &m, &a, 2_000_000), Err(Error::Cache { line: 2, .. })));
}

#[test]
fn cli_resume_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let p = path.to_str().unwrap();
    let base = ["zsigmondy", "--map", "x^2+3", "--alpha", "1/2"];
    let (_, fresh, _) = common::run(&[&base[..], &["--max-n", "9"]].concat());
    common::run(&[&base[..], &["--max-n", "4", "--cache", p]].concat());
    let (_, resumed, _) = common::run(&[&base[..], &["--max-n", "9", "--cache", p]].concat());
    assert_eq!(fresh, resumed);
}
