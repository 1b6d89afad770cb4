//! C ABI over `girylab`.
//!
//! Values cross the boundary as opaque handles or as UTF-8 JSON strings in
//! the same wire format the CLI uses. Every fallible call returns a
//! [`GiryStatus`]; on anything but `GIRY_STATUS_OK` the message is available from
//! [`girylab_last_error`] until the next call on the same thread.
//!
//! Ownership: handles come from `*_from_json` or other constructors and are
//! released with the matching `*_free`. Strings written to `char **out`
//! belong to the caller and are released with [`girylab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use girylab::amplitudes::{l2_to_l1, AmpDist};
use girylab::eval::{eval_str, parse_set};
use girylab::json::{dist_from_value, dist_to_value};
use girylab::stdspace::{refinement_reports, RefinementTree, Split};
use girylab::suites::{run_suites, SuiteConfig};
use girylab::{CountableDist, Error};

/// Result code of every fallible call. One code per library error, plus the
/// boundary's own failures.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GiryStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Panic = 3,
    Parse = 10,
    DuplicateIndex = 11,
    NegativeWeight = 12,
    MassNotOne = 13,
    InvalidTail = 14,
    UnsupportedSetShape = 15,
    EnumerationCapExceeded = 16,
    PartialMap = 17,
    TailUnsupported = 18,
    PartialFamily = 19,
    UnknownSpace = 20,
    UnknownAlgebra = 21,
    PartialSequence = 22,
    OutOfCarrier = 23,
    BoundExceeded = 24,
    NotAffine = 25,
    NotPermutation = 26,
    IndexOutOfRange = 27,
    EmptyPart = 28,
    NotAPartition = 29,
    UnknownPoint = 30,
    BrokenChain = 31,
    NormNotOne = 32,
    TypeMismatch = 33,
    UnknownSuite = 34,
    BadConfig = 35,
}

impl From<&Error> for GiryStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DuplicateIndex(_) => GiryStatus::DuplicateIndex,
            Error::NegativeWeight { .. } => GiryStatus::NegativeWeight,
            Error::MassNotOne(_) => GiryStatus::MassNotOne,
            Error::InvalidTail(_) => GiryStatus::InvalidTail,
            Error::UnsupportedSetShape => GiryStatus::UnsupportedSetShape,
            Error::EnumerationCapExceeded(_) => GiryStatus::EnumerationCapExceeded,
            Error::PartialMap(_) => GiryStatus::PartialMap,
            Error::TailUnsupported => GiryStatus::TailUnsupported,
            Error::PartialFamily(_) => GiryStatus::PartialFamily,
            Error::UnknownSpace(_) => GiryStatus::UnknownSpace,
            Error::UnknownAlgebra(_) => GiryStatus::UnknownAlgebra,
            Error::PartialSequence(_) => GiryStatus::PartialSequence,
            Error::OutOfCarrier(_) => GiryStatus::OutOfCarrier,
            Error::BoundExceeded { .. } => GiryStatus::BoundExceeded,
            Error::NotAffine(_) => GiryStatus::NotAffine,
            Error::NotPermutation(_) => GiryStatus::NotPermutation,
            Error::IndexOutOfRange { .. } => GiryStatus::IndexOutOfRange,
            Error::EmptyPart => GiryStatus::EmptyPart,
            Error::NotAPartition(_) => GiryStatus::NotAPartition,
            Error::UnknownPoint(_) => GiryStatus::UnknownPoint,
            Error::BrokenChain(_) => GiryStatus::BrokenChain,
            Error::NormNotOne(_) => GiryStatus::NormNotOne,
            Error::TypeMismatch(_) => GiryStatus::TypeMismatch,
            Error::UnknownSuite(_) => GiryStatus::UnknownSuite,
            Error::BadConfig(_) => GiryStatus::BadConfig,
            Error::Parse(_) => GiryStatus::Parse,
        }
    }
}

/// A validated probability distribution on the naturals.
pub struct GiryDist(CountableDist);

/// A normalized family of complex rational amplitudes.
pub struct GiryAmp(AmpDist);

/// An immutable partition refinement tree.
pub struct GiryTree(RefinementTree);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', "?")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(GiryStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Runs `f`, records any error, and converts panics into `GIRY_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> GiryStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GiryStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {msg}"));
            GiryStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(GiryStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> FfiResult<&'a str> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure(GiryStatus::InvalidUtf8, e.to_string()))
}

unsafe fn read_json(s: *const c_char) -> FfiResult<serde_json::Value> {
    Ok(serde_json::from_str(read_str(s)?).map_err(Error::from)?)
}

unsafe fn handle<'a, T>(p: *const T) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    let c = CString::new(s).map_err(|e| Failure(GiryStatus::Parse, e.to_string()))?;
    if out.is_null() {
        return Err(null());
    }
    out.write(c.into_raw());
    Ok(())
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null());
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on this thread; do not free.
#[no_mangle]
pub extern "C" fn girylab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn girylab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned through a `char **out` parameter.
///
/// # Safety
/// `s` is null or came from this library and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn girylab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Evaluates a JSON expression (the CLI `eval` format) and writes the JSON
/// result to `out`.
///
/// # Safety
/// `expr` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_eval(expr: *const c_char, out: *mut *mut c_char) -> GiryStatus {
    guard(|| {
        let v = eval_str(read_str(expr)?)?;
        write_string(out, v.to_string())
    })
}

/// Runs law suites with a JSON config (null for the defaults), writes the
/// JSON report to `out` and whether every law held to `passed`.
///
/// # Safety
/// `config` is null or nul-terminated; `out` and `passed` are writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_check(config: *const c_char, out: *mut *mut c_char, passed: *mut bool) -> GiryStatus {
    guard(|| {
        let cfg: SuiteConfig = if config.is_null() {
            SuiteConfig::default()
        } else {
            serde_json::from_value(read_json(config)?).map_err(|e| Error::BadConfig(e.to_string()))?
        };
        let reports = run_suites(&cfg)?;
        let ok = reports.iter().all(|r| r.passed());
        let doc = serde_json::json!({ "config": cfg, "passed": ok, "suites": reports });
        write_string(out, doc.to_string())?;
        write_out(passed, ok)
    })
}

/// Parses and validates a distribution.
///
/// # Safety
/// `json` is nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_dist_from_json(json: *const c_char, out: *mut *mut GiryDist) -> GiryStatus {
    guard(|| write_handle(out, GiryDist(dist_from_value(&read_json(json)?)?)))
}

/// The point mass at `i`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_dist_dirac(i: u64, out: *mut *mut GiryDist) -> GiryStatus {
    guard(|| write_handle(out, GiryDist(CountableDist::dirac(i))))
}

/// Canonical JSON of a distribution.
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_dist_to_json(d: *const GiryDist, out: *mut *mut c_char) -> GiryStatus {
    guard(|| write_string(out, dist_to_value(&handle(d)?.0).to_string()))
}

/// Least index with positive weight, searching at most `cap` indices.
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_dist_min_support(d: *const GiryDist, cap: u64, out: *mut u64) -> GiryStatus {
    guard(|| write_out(out, handle(d)?.0.min_support(cap)?))
}

/// Mass of a set given as JSON (`"all"`, `{"finite": [..]}`,
/// `{"cofinite": [..]}`, `{"below": n}`), written as an `"n/d"` string.
///
/// # Safety
/// `d` is a live handle; `set` is nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_dist_ev(d: *const GiryDist, set: *const c_char, out: *mut *mut c_char) -> GiryStatus {
    guard(|| {
        let set = parse_set(&read_json(set)?)?;
        write_string(out, handle(d)?.0.ev(&set)?.to_wire())
    })
}

/// Image under the table `map[0..len]`. Indices at or beyond `len` in the
/// support are an error.
///
/// # Safety
/// `d` is a live handle; `map` points to `len` values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_dist_pushforward(
    d: *const GiryDist,
    map: *const u64,
    len: usize,
    out: *mut *mut GiryDist,
) -> GiryStatus {
    guard(|| {
        if map.is_null() && len > 0 {
            return Err(null());
        }
        let table: &[u64] = if len == 0 { &[] } else { std::slice::from_raw_parts(map, len) };
        let image = handle(d)?.0.pushforward(|i| table.get(i as usize).copied())?;
        write_handle(out, GiryDist(image))
    })
}

/// Structural equality of two distributions.
///
/// # Safety
/// Both are live handles.
#[no_mangle]
pub unsafe extern "C" fn girylab_dist_equal(a: *const GiryDist, b: *const GiryDist, out: *mut bool) -> GiryStatus {
    guard(|| write_out(out, handle(a)?.0 == handle(b)?.0))
}

/// # Safety
/// `d` is null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn girylab_dist_free(d: *mut GiryDist) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Parses `{"amplitudes": [[i, "re", "im"], ...]}` and checks the squared
/// norm is exactly 1.
///
/// # Safety
/// `json` is nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_amp_from_json(json: *const c_char, out: *mut *mut GiryAmp) -> GiryStatus {
    guard(|| write_handle(out, GiryAmp(AmpDist::from_json(&read_json(json)?)?)))
}

/// # Safety
/// `a` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_amp_to_json(a: *const GiryAmp, out: *mut *mut c_char) -> GiryStatus {
    guard(|| write_string(out, handle(a)?.0.to_json().to_string()))
}

/// The probability distribution of squared moduli.
///
/// # Safety
/// `a` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_amp_to_dist(a: *const GiryAmp, out: *mut *mut GiryDist) -> GiryStatus {
    guard(|| write_handle(out, GiryDist(l2_to_l1(&handle(a)?.0))))
}

/// # Safety
/// `a` is null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn girylab_amp_free(a: *mut GiryAmp) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Builds a tree from `{"points": [..], "splits": [..]}`.
///
/// # Safety
/// `json` is nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_tree_from_json(json: *const c_char, out: *mut *mut GiryTree) -> GiryStatus {
    guard(|| write_handle(out, GiryTree(RefinementTree::from_json(&read_json(json)?)?)))
}

/// # Safety
/// `t` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_tree_to_json(t: *const GiryTree, out: *mut *mut c_char) -> GiryStatus {
    guard(|| write_string(out, handle(t)?.0.to_json().to_string()))
}

/// Applies one split `{"atom", "left", "right"}` to the deepest level,
/// producing a new tree. The input tree is unchanged.
///
/// # Safety
/// `t` is a live handle; `split` is nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_tree_refine(t: *const GiryTree, split: *const c_char, out: *mut *mut GiryTree) -> GiryStatus {
    guard(|| {
        let s: Split = serde_json::from_value(read_json(split)?).map_err(Error::from)?;
        write_handle(out, GiryTree(handle(t)?.0.apply(&s)?))
    })
}

/// Number of levels.
///
/// # Safety
/// `t` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_tree_depth(t: *const GiryTree, out: *mut usize) -> GiryStatus {
    guard(|| write_out(out, handle(t)?.0.depth()))
}

/// Atom index of point `x` at level `n` (levels start at 1).
///
/// # Safety
/// `t` is a live handle; `x` is nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_tree_atom_of(t: *const GiryTree, n: usize, x: *const c_char, out: *mut u64) -> GiryStatus {
    guard(|| write_out(out, handle(t)?.0.atoms_map(n, read_str(x)?)?))
}

/// Runs every refinement check on the tree; writes the JSON law reports to
/// `out` (may be null) and the overall verdict to `passed`.
///
/// # Safety
/// `t` is a live handle; `passed` is writable; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn girylab_tree_check(t: *const GiryTree, out: *mut *mut c_char, passed: *mut bool) -> GiryStatus {
    guard(|| {
        let reports = refinement_reports(&handle(t)?.0);
        write_out(passed, reports.iter().all(|r| r.passed()))?;
        if !out.is_null() {
            let doc = serde_json::to_value(&reports).map_err(Error::from)?;
            write_string(out, doc.to_string())?;
        }
        Ok(())
    })
}

/// # Safety
/// `t` is null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn girylab_tree_free(t: *mut GiryTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
