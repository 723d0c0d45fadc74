//! C ABI over the z2n-algebra library.
//!
//! Every object crosses the boundary as an opaque handle created and
//! destroyed here; strings returned by the library are heap-allocated and
//! must be released with [`z2n_string_free`]. Fallible calls return a null
//! pointer and record a status code and message, retrievable per thread
//! via [`z2n_last_status`] and [`z2n_last_error`].
//!
//! The header `include/z2n.h` is generated from this file by cbindgen at
//! build time.
//!
//! Pointer contract, uniform across the API: handle and string arguments
//! must be null or values previously returned by this library that have
//! not been freed; text arguments must be null or NUL-terminated UTF-8.
//! Null and invalid UTF-8 are reported, never dereferenced.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use z2n_algebra::session::{parse_atlas, parse_morphism, parse_session};
use z2n_algebra::{Error, FormalSignature, Morphism, Series, SignTable, Valuation};

/// Status of the most recent fallible call on this thread.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Z2nStatus {
    Ok = 0,
    /// A required pointer argument was null or not valid UTF-8.
    InvalidArgument = 1,
    /// Text failed to parse.
    ParseError = 2,
    /// The operation is undefined for these operands (wrong signature,
    /// non-invertible element, out-of-range order, ...).
    DomainError = 3,
    /// A file could not be read.
    IoError = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<(Z2nStatus, CString)> =
        RefCell::new((Z2nStatus::Ok, CString::default()));
}

fn set_status(status: Z2nStatus, message: &str) {
    let message = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = (status, message));
}

fn clear_status() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = (Z2nStatus::Ok, CString::default()));
}

fn record(err: &Error) {
    let status = match err {
        Error::Parse(_) => Z2nStatus::ParseError,
        Error::Io(_) => Z2nStatus::IoError,
        _ => Z2nStatus::DomainError,
    };
    set_status(status, &err.to_string());
}

/// Opaque handle: a formal signature (grading length, base and formal
/// variables, truncation order).
pub struct Z2nSignature(FormalSignature);

/// Opaque handle: a series in the quotient algebra.
pub struct Z2nSeries(Series);

/// Opaque handle: a centered superdomain morphism.
pub struct Z2nMorphism(Morphism);

/// Status of the most recent fallible call on the calling thread.
#[no_mangle]
pub extern "C" fn z2n_last_status() -> Z2nStatus {
    LAST_ERROR.with(|slot| slot.borrow().0)
}

/// Message of the most recent error on the calling thread. The pointer is
/// valid until the next fallible call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn z2n_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().1.as_ptr())
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        set_status(Z2nStatus::InvalidArgument, "null pointer argument");
        return None;
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Some(s),
        Err(_) => {
            set_status(Z2nStatus::InvalidArgument, "argument is not valid UTF-8");
            None
        }
    }
}

unsafe fn handle_arg<'a, T>(ptr: *const T) -> Option<&'a T> {
    if ptr.is_null() {
        set_status(Z2nStatus::InvalidArgument, "null handle argument");
        None
    } else {
        Some(&*ptr)
    }
}

fn boxed<T>(value: T) -> *mut T {
    clear_status();
    Box::into_raw(Box::new(value))
}

fn string_out(text: String) -> *mut c_char {
    clear_status();
    match CString::new(text) {
        Ok(c) => c.into_raw(),
        Err(_) => {
            set_status(Z2nStatus::InvalidArgument, "result contained a NUL byte");
            ptr::null_mut()
        }
    }
}

/// Frees a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn z2n_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a signature header block (`n = ..`, `p = ..`, `q = ..`,
/// `T = ..`, `sigma.k = bits..`). Returns null on error.
#[no_mangle]
pub unsafe extern "C" fn z2n_signature_parse(header: *const c_char) -> *mut Z2nSignature {
    let Some(text) = utf8_arg(header) else {
        return ptr::null_mut();
    };
    match parse_session(text, None) {
        Ok(session) => boxed(Z2nSignature(session.signature)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn z2n_signature_free(sig: *mut Z2nSignature) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

/// Truncation order of a signature.
#[no_mangle]
pub unsafe extern "C" fn z2n_signature_order(sig: *const Z2nSignature) -> usize {
    handle_arg(sig).map(|s| s.0.order()).unwrap_or(0)
}

/// Parses a series expression over the signature. Returns null on error.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_parse(
    sig: *const Z2nSignature,
    text: *const c_char,
) -> *mut Z2nSeries {
    let (Some(sig), Some(text)) = (handle_arg(sig), utf8_arg(text)) else {
        return ptr::null_mut();
    };
    match z2n_algebra::parse::parse_series(&sig.0, text) {
        Ok(series) => boxed(Z2nSeries(series)),
        Err(e) => {
            record(&Error::Parse(e));
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn z2n_series_free(series: *mut Z2nSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Canonical text of a series; free with `z2n_string_free`.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_to_string(series: *const Z2nSeries) -> *mut c_char {
    match handle_arg(series) {
        Some(s) => string_out(s.0.to_string()),
        None => ptr::null_mut(),
    }
}

unsafe fn binary_op(
    a: *const Z2nSeries,
    b: *const Z2nSeries,
    op: impl Fn(&Series, &Series) -> Result<Series, Error>,
) -> *mut Z2nSeries {
    let (Some(a), Some(b)) = (handle_arg(a), handle_arg(b)) else {
        return ptr::null_mut();
    };
    match op(&a.0, &b.0) {
        Ok(series) => boxed(Z2nSeries(series)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

/// Sum of two series over one signature.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_add(
    a: *const Z2nSeries,
    b: *const Z2nSeries,
) -> *mut Z2nSeries {
    binary_op(a, b, Series::add)
}

/// Difference of two series over one signature.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_sub(
    a: *const Z2nSeries,
    b: *const Z2nSeries,
) -> *mut Z2nSeries {
    binary_op(a, b, Series::sub)
}

/// Graded product of two series over one signature.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_mul(
    a: *const Z2nSeries,
    b: *const Z2nSeries,
) -> *mut Z2nSeries {
    binary_op(a, b, Series::mul)
}

/// Negation.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_neg(a: *const Z2nSeries) -> *mut Z2nSeries {
    match handle_arg(a) {
        Some(a) => boxed(Z2nSeries(a.0.neg())),
        None => ptr::null_mut(),
    }
}

/// Multiplicative inverse in the quotient; fails when the independent term
/// vanishes at the center.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_invert(a: *const Z2nSeries) -> *mut Z2nSeries {
    let Some(a) = handle_arg(a) else {
        return ptr::null_mut();
    };
    match a.0.invert() {
        Ok(series) => boxed(Z2nSeries(series)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

/// Passes to the quotient at a smaller truncation order.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_truncate(
    a: *const Z2nSeries,
    order: usize,
) -> *mut Z2nSeries {
    let Some(a) = handle_arg(a) else {
        return ptr::null_mut();
    };
    match a.0.truncate(order) {
        Ok(series) => boxed(Z2nSeries(series)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

/// Polynomial part of the Taylor split at adic order `k`.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_approx(a: *const Z2nSeries, k: usize) -> *mut Z2nSeries {
    let Some(a) = handle_arg(a) else {
        return ptr::null_mut();
    };
    match a.0.polynomial_approximation(k) {
        Ok(series) => boxed(Z2nSeries(series)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

fn valuation_out(v: Valuation) -> i64 {
    match v {
        Valuation::Finite(k) => k as i64,
        Valuation::Infinite => -1,
    }
}

/// Order of the filtration by the formal-variable ideal; -1 for the zero
/// series (infinity).
#[no_mangle]
pub unsafe extern "C" fn z2n_series_j_adic_order(a: *const Z2nSeries) -> i64 {
    handle_arg(a).map(|a| valuation_out(a.0.j_adic_order())).unwrap_or(-1)
}

/// Order of the filtration by the maximal homogeneous ideal at the center;
/// -1 for the zero series (infinity).
#[no_mangle]
pub unsafe extern "C" fn z2n_series_m_adic_order(a: *const Z2nSeries) -> i64 {
    handle_arg(a).map(|a| valuation_out(a.0.m_adic_order())).unwrap_or(-1)
}

/// The common degree of a homogeneous series, as text like `(0,1)`.
/// Returns null (with a domain error) when the series is not homogeneous.
#[no_mangle]
pub unsafe extern "C" fn z2n_series_degree(a: *const Z2nSeries) -> *mut c_char {
    let Some(a) = handle_arg(a) else {
        return ptr::null_mut();
    };
    match a.0.degree() {
        Ok(d) => string_out(d.to_string()),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

/// Parses a morphism file (source/target headers plus coordinate
/// pullbacks). Returns null on error.
#[no_mangle]
pub unsafe extern "C" fn z2n_morphism_parse(text: *const c_char) -> *mut Z2nMorphism {
    let Some(text) = utf8_arg(text) else {
        return ptr::null_mut();
    };
    match parse_morphism(text, None) {
        Ok(m) => boxed(Z2nMorphism(m)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn z2n_morphism_free(m: *mut Z2nMorphism) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Pulls a series over the morphism target back to its source.
#[no_mangle]
pub unsafe extern "C" fn z2n_morphism_pullback(
    m: *const Z2nMorphism,
    g: *const Z2nSeries,
) -> *mut Z2nSeries {
    let (Some(m), Some(g)) = (handle_arg(m), handle_arg(g)) else {
        return ptr::null_mut();
    };
    match m.0.pullback(&g.0) {
        Ok(series) => boxed(Z2nSeries(series)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

/// Composite of `first: M -> N` with `second: N -> P`.
#[no_mangle]
pub unsafe extern "C" fn z2n_morphism_compose(
    first: *const Z2nMorphism,
    second: *const Z2nMorphism,
) -> *mut Z2nMorphism {
    let (Some(f), Some(g)) = (handle_arg(first), handle_arg(second)) else {
        return ptr::null_mut();
    };
    match f.0.compose(&g.0) {
        Ok(m) => boxed(Z2nMorphism(m)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

/// Order-by-order inverse; fails when the linear part is singular.
#[no_mangle]
pub unsafe extern "C" fn z2n_morphism_invert(m: *const Z2nMorphism) -> *mut Z2nMorphism {
    let Some(m) = handle_arg(m) else {
        return ptr::null_mut();
    };
    match m.0.invert() {
        Ok(inv) => boxed(Z2nMorphism(inv)),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

/// Realizes a sign-table file (text contents) as a degree assignment over
/// Z2^(2m); returns the listing (`n = ..` plus `sigma.k = ..` lines).
#[no_mangle]
pub unsafe extern "C" fn z2n_realize_signs(table: *const c_char) -> *mut c_char {
    let Some(text) = utf8_arg(table) else {
        return ptr::null_mut();
    };
    let run = || -> Result<String, Error> {
        let table = SignTable::from_text(text)?;
        let assignment = z2n_algebra::realize_sign_rule(&table)?;
        Ok(format!("n = {}\n{}", assignment.grading_length(), assignment))
    };
    match run() {
        Ok(listing) => string_out(listing),
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}

/// Runs every atlas check for an atlas file on disk and returns the
/// line-oriented PASS/FAIL report. `all_passed`, when non-null, receives
/// 1 if every check passed and 0 otherwise.
#[no_mangle]
pub unsafe extern "C" fn z2n_check_atlas_file(
    path: *const c_char,
    all_passed: *mut i32,
) -> *mut c_char {
    let Some(path) = utf8_arg(path) else {
        return ptr::null_mut();
    };
    let run = || -> Result<(String, bool), Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        let base = Path::new(path).parent().unwrap_or(Path::new("."));
        let (atlas, witnesses) = parse_atlas(&text, base, None)?;
        let reports = z2n_algebra::atlas::run_all_checks(&atlas, &witnesses)?;
        let ok = reports.iter().all(|r| r.passed());
        let text = reports
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("\n");
        Ok((text, ok))
    };
    match run() {
        Ok((report, ok)) => {
            if !all_passed.is_null() {
                *all_passed = ok as i32;
            }
            string_out(report)
        }
        Err(e) => {
            record(&e);
            ptr::null_mut()
        }
    }
}
