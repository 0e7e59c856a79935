use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use dynzsig_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    dz_string_free(s);
    out
}

unsafe fn parse(expr: &str) -> *mut DzMap {
    let mut m = ptr::null_mut();
    assert_eq!(dz_map_parse(c(expr).as_ptr(), &mut m), DzStatus::Ok);
    m
}

#[test]
fn map_lifecycle() {
    unsafe {
        let m = parse("x^2 + 1");
        let mut d = 0u32;
        assert_eq!(dz_map_degree(m, &mut d), DzStatus::Ok);
        assert_eq!(d, 2);
        let mut s = ptr::null_mut();
        assert_eq!(dz_map_render(m, &mut s), DzStatus::Ok);
        assert_eq!(take(s), "x^2+1");
        assert_eq!(dz_map_evaluate(m, c("1/2").as_ptr(), &mut s), DzStatus::Ok);
        assert_eq!(take(s), "5/4");
        assert_eq!(dz_map_evaluate(m, c("inf").as_ptr(), &mut s), DzStatus::Ok);
        assert_eq!(take(s), "inf");
        let mut p = true;
        assert_eq!(dz_map_is_power_map(m, &mut p), DzStatus::Ok);
        assert!(!p);
        dz_map_free(m);
        dz_map_free(ptr::null_mut());
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(dz_map_parse(c("x^2 + * 1").as_ptr(), &mut m), DzStatus::ParseError);
        assert!(m.is_null());
        let msg = CStr::from_ptr(dz_last_error_message()).to_str().unwrap();
        assert!(msg.contains("position 6"), "{msg}");
        assert_eq!(dz_map_parse(ptr::null(), &mut m), DzStatus::NullPointer);
        assert_eq!(dz_map_parse(c("x^2").as_ptr(), ptr::null_mut()), DzStatus::NullPointer);
        let mut d = 0;
        assert_eq!(dz_map_degree(ptr::null(), &mut d), DzStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(dz_map_parse(bad.as_ptr().cast(), &mut m), DzStatus::InvalidUtf8);
        let mut s = ptr::null_mut();
        assert_eq!(dz_galois_tower_json(-2, 3, &mut s), DzStatus::InvalidInput);
    }
}

#[test]
fn heights_and_reports() {
    unsafe {
        let m = parse("x^2");
        let (mut est, mut rad) = (0.0, 1.0);
        assert_eq!(dz_canonical_height(m, c("2").as_ptr(), 1e-6, &mut est, &mut rad), DzStatus::Ok);
        assert!((est - 2f64.ln()).abs() < 1e-12 && rad == 0.0);
        assert_eq!(dz_canonical_height(m, c("2").as_ptr(), -1.0, &mut est, &mut rad), DzStatus::InvalidInput);
        let mut s = ptr::null_mut();
        assert_eq!(dz_zsigmondy_json(m, c("2").as_ptr(), 6, &mut s), DzStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(v["zsigmondy_set"], serde_json::json!([2, 3, 4, 5, 6]));
        dz_map_free(m);
        assert_eq!(dz_galois_tower_json(1, 4, &mut s), DzStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert!(v["records"].as_array().unwrap().iter().all(|r| r["status"] == "certified"));
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(dz_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dynzsig.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "dz_map_parse",
        "dz_map_free",
        "dz_map_degree",
        "dz_map_render",
        "dz_map_evaluate",
        "dz_map_is_power_map",
        "dz_canonical_height",
        "dz_zsigmondy_json",
        "dz_galois_tower_json",
        "dz_last_error_message",
        "dz_string_free",
        "dz_version",
        "typedef struct DzMap DzMap",
        "DZ_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(&src, "#include \"dynzsig.h\"\nint main(void) { DzMap *m = 0; return dz_map_parse(\"x^2\", &m) == DZ_STATUS_OK ? 0 : 1; }\n").unwrap();
    match Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(_) => eprintln!("no C compiler found; skipped compile check"),
    }
}
