//! C ABI over the dynzsig library.
//!
//! Maps are opaque `DzMap` handles. Every fallible function returns a
//! `DzStatus`; on failure `dz_last_error_message` describes the error for
//! the calling thread. Strings returned through out-parameters are owned by
//! the caller and must be released with `dz_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dynzsig::arith::parse_ext_rational;
use dynzsig::error::Error;
use dynzsig::galois::tower_report;
use dynzsig::heights::canonical_height;
use dynzsig::map::RationalMap;
use dynzsig::places_q::DEFAULT_FACTOR_BUDGET;
use dynzsig::zsigmondy::{zsigmondy_report, ZsigmondyConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    ResourceCap = 5,
    Invariant = 6,
    Panic = 7,
}

/// Opaque handle to a rational map over Q.
pub struct DzMap {
    inner: RationalMap,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: DzStatus, msg: &str) -> DzStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> DzStatus {
    match e {
        Error::Parse { .. } | Error::CommonFactor { .. } | Error::Degenerate(_) => DzStatus::ParseError,
        Error::ResourceCap(_) => DzStatus::ResourceCap,
        Error::Invariant(_) => DzStatus::Invariant,
        _ => DzStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), DzStatus>) -> DzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DzStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(DzStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: dynzsig::error::Result<T>) -> Result<T, DzStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, DzStatus> {
    if p.is_null() {
        return Err(fail(DzStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(DzStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

unsafe fn read_map<'a>(m: *const DzMap) -> Result<&'a RationalMap, DzStatus> {
    m.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| fail(DzStatus::NullPointer, "null map handle"))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), DzStatus> {
    if out.is_null() {
        return Err(fail(DzStatus::NullPointer, "null output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), DzStatus> {
    let c = CString::new(s).map_err(|_| fail(DzStatus::Invariant, "interior NUL in output"))?;
    write_out(out, c.into_raw())
}

/// Parses a map expression in `x` into a new handle stored in `*out`.
///
/// # Safety
/// `expr` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dz_map_parse(expr: *const c_char, out: *mut *mut DzMap) -> DzStatus {
    guard(|| {
        let s = read_str(expr)?;
        let map = lift(RationalMap::parse(s))?;
        write_out(out, Box::into_raw(Box::new(DzMap { inner: map })))
    })
}

/// Releases a handle from `dz_map_parse`. Null is ignored.
///
/// # Safety
/// `map` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dz_map_free(map: *mut DzMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dz_map_degree(map: *const DzMap, out: *mut u32) -> DzStatus {
    guard(|| write_out(out, read_map(map)?.degree() as u32))
}

/// Canonical text of the map.
///
/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dz_map_render(map: *const DzMap, out: *mut *mut c_char) -> DzStatus {
    guard(|| write_string(out, read_map(map)?.render()))
}

/// `φ(z)` for `z` given as `p`, `p/q` or `inf`.
///
/// # Safety
/// `map` must be a live handle, `z` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dz_map_evaluate(map: *const DzMap, z: *const c_char, out: *mut *mut c_char) -> DzStatus {
    guard(|| {
        let m = read_map(map)?;
        let z = lift(parse_ext_rational(read_str(z)?))?;
        write_string(out, m.evaluate(&z).to_string())
    })
}

/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dz_map_is_power_map(map: *const DzMap, out: *mut bool) -> DzStatus {
    guard(|| write_out(out, read_map(map)?.is_power_map()))
}

/// Canonical height of `alpha` with `|estimate - ĥ| ≤ radius`.
///
/// # Safety
/// `map` must be a live handle, `alpha` a NUL-terminated string, and both
/// output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn dz_canonical_height(
    map: *const DzMap,
    alpha: *const c_char,
    tol: f64,
    estimate: *mut f64,
    radius: *mut f64,
) -> DzStatus {
    guard(|| {
        let m = read_map(map)?;
        let a = lift(parse_ext_rational(read_str(alpha)?))?;
        let e = lift(canonical_height(m, &a, tol))?;
        write_out(estimate, e.estimate)?;
        write_out(radius, e.error_radius)
    })
}

/// Zsigmondy report for the orbit of `alpha` up to level `max_n`, as JSON.
///
/// # Safety
/// `map` must be a live handle, `alpha` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dz_zsigmondy_json(
    map: *const DzMap,
    alpha: *const c_char,
    max_n: u32,
    out: *mut *mut c_char,
) -> DzStatus {
    guard(|| {
        let m = read_map(map)?;
        let a = lift(parse_ext_rational(read_str(alpha)?))?;
        let cfg = ZsigmondyConfig {
            max_n,
            squarefree_max_n: max_n.min(ZsigmondyConfig::default().squarefree_max_n),
            ..Default::default()
        };
        let rep = lift(zsigmondy_report(m, &a, &cfg))?;
        let json = serde_json::to_string(&rep).map_err(|e| fail(DzStatus::Invariant, &e.to_string()))?;
        write_string(out, json)
    })
}

/// Tower certificates for `x^2 + a` at levels `0..=max_n`, as JSON.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dz_galois_tower_json(a: i64, max_n: u32, out: *mut *mut c_char) -> DzStatus {
    guard(|| {
        let rep = lift(tower_report(&a.into(), max_n, DEFAULT_FACTOR_BUDGET))?;
        let json = serde_json::to_string(&rep).map_err(|e| fail(DzStatus::Invariant, &e.to_string()))?;
        write_string(out, json)
    })
}

/// Message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn dz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
