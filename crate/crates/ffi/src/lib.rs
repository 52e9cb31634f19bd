//! C interface to `matchdist`.
//!
//! Presentations are opaque handles. Every fallible call returns an
//! [`MdStatus`]; on failure [`md_last_error_message`] describes the cause.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`md_string_free`]. Numbers cross the boundary as exact
//! rational text such as `"3/4"` or `"inf"`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use matchdist::approx::{matching_distance_approx_threads, GridSpec};
use matchdist::bottleneck::bottleneck_bars;
use matchdist::diagram::{format_bars, parse_bars};
use matchdist::error::Error;
use matchdist::exact::{matching_distance_exact_with, ExactOptions};
use matchdist::numeric::parse_rational;
use matchdist::presentation::{parse_presentation, GradedPresentation};
use matchdist::slice::{slice_diagram, Slice};

/// Result codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    ContractViolation = 5,
    Panic = 6,
}

/// A parsed graded presentation.
pub struct MdPresentation {
    inner: GradedPresentation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

struct Failure(MdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Contract(_) => MdStatus::ContractViolation,
            Error::Syntax { .. }
            | Error::InvalidNumber(_)
            | Error::NotPrime(_)
            | Error::IndexOutOfRange { .. }
            | Error::GradeCondition { .. }
            | Error::DivisionByZero => MdStatus::ParseError,
            _ => MdStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MdStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MdStatus::Panic
        }
    }
}

unsafe fn read_text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MdStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MdStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const MdPresentation, name: &str) -> Result<&'a GradedPresentation, Failure> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(MdStatus::NullPointer, format!("{name} is null")))
}

fn check_out<T>(p: *mut T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(MdStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn owned(s: String) -> *mut c_char {
    CString::new(s).expect("output has no nul bytes").into_raw()
}

/// Parses presentation text in the `bpres` format into a new handle.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn md_presentation_parse(text: *const c_char, out: *mut *mut MdPresentation) -> MdStatus {
    guard(|| {
        check_out(out, "out")?;
        let source = read_text(text, "text")?;
        let inner = parse_presentation(source)?;
        *out = Box::into_raw(Box::new(MdPresentation { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must come from [`md_presentation_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn md_presentation_free(p: *mut MdPresentation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of generators, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn md_presentation_num_generators(p: *const MdPresentation) -> usize {
    p.as_ref().map_or(0, |h| h.inner.num_generators())
}

/// Number of relations, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn md_presentation_num_relations(p: *const MdPresentation) -> usize {
    p.as_ref().map_or(0, |h| h.inner.num_relations())
}

/// Exact matching distance. `threads = 0` uses the default pool.
/// `value_out` receives the distance; `witness_json_out` may be null.
///
/// # Safety
/// Handles must be live; out-pointers must be valid or, where allowed, null.
#[no_mangle]
pub unsafe extern "C" fn md_exact_distance(
    a: *const MdPresentation,
    b: *const MdPresentation,
    threads: u32,
    value_out: *mut *mut c_char,
    witness_json_out: *mut *mut c_char,
) -> MdStatus {
    guard(|| {
        let (pa, pb) = (handle(a, "a")?, handle(b, "b")?);
        check_out(value_out, "value_out")?;
        let options = ExactOptions {
            threads: (threads > 0).then_some(threads as usize),
            ..ExactOptions::default()
        };
        let result = matching_distance_exact_with(pa, pb, &options);
        *value_out = owned(result.value.to_string());
        if !witness_json_out.is_null() {
            let json = serde_json::to_string(&result.witness).expect("witness serializes");
            *witness_json_out = owned(json);
        }
        Ok(())
    })
}

/// Grid lower bound on `grid_s` slopes times `grid_t` offsets.
/// `slice_json_out` may be null.
///
/// # Safety
/// Handles must be live; out-pointers must be valid or, where allowed, null.
#[no_mangle]
pub unsafe extern "C" fn md_approx_distance(
    a: *const MdPresentation,
    b: *const MdPresentation,
    grid_s: usize,
    grid_t: usize,
    value_out: *mut *mut c_char,
    slice_json_out: *mut *mut c_char,
) -> MdStatus {
    guard(|| {
        let (pa, pb) = (handle(a, "a")?, handle(b, "b")?);
        check_out(value_out, "value_out")?;
        let result = matching_distance_approx_threads(pa, pb, &GridSpec::new(grid_s, grid_t), None)?;
        *value_out = owned(result.lower_bound.to_string());
        if !slice_json_out.is_null() {
            let json = serde_json::to_string(&result.best_slice).expect("slice serializes");
            *slice_json_out = owned(json);
        }
        Ok(())
    })
}

/// Barcode of a presentation on the slice `y = s·x + t`, one `birth death`
/// line per bar in weighted slice coordinates.
///
/// # Safety
/// `p` must be live, `s` and `t` nul-terminated, `bars_out` valid.
#[no_mangle]
pub unsafe extern "C" fn md_slice_diagram(
    p: *const MdPresentation,
    s: *const c_char,
    t: *const c_char,
    bars_out: *mut *mut c_char,
) -> MdStatus {
    guard(|| {
        let pres = handle(p, "p")?;
        check_out(bars_out, "bars_out")?;
        let s = parse_rational(read_text(s, "s")?)?;
        let t = parse_rational(read_text(t, "t")?)?;
        let ell = Slice::new(s, t)?;
        *bars_out = owned(format_bars(&slice_diagram(pres, &ell).bars()));
        Ok(())
    })
}

/// Bottleneck distance between two barcodes given as `birth death` lines.
///
/// # Safety
/// Inputs must be nul-terminated; `value_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn md_bottleneck(
    bars_a: *const c_char,
    bars_b: *const c_char,
    value_out: *mut *mut c_char,
) -> MdStatus {
    guard(|| {
        check_out(value_out, "value_out")?;
        let a = parse_bars(read_text(bars_a, "bars_a")?)?;
        let b = parse_bars(read_text(bars_b, "bars_b")?)?;
        *value_out = owned(bottleneck_bars(&a, &b).value.to_string());
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn md_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn md_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn md_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
