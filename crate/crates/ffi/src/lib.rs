//! C ABI for gapforge.
//!
//! Every function returns a [`GfStatus`]; on failure the message is
//! available from [`gf_last_error`] until the next call on the same thread.
//! Strings handed out by the library must be released with
//! [`gf_string_free`], reductions with [`gf_reduction_free`]. Data crosses
//! the boundary as JSON in the same formats the `forge` binary reads and
//! writes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gapforge::e3lin2::{balance_negations, parse_e3lin2};
use gapforge::graph::{DistanceMatrix, TourMultiset};
use gapforge::hybrid::build_hybrid;
use gapforge::oracle::{brute_permutation, held_karp};
use gapforge::pipeline::{run_pipeline, PipelineConfig};
use gapforge::reduction::{AssignmentFile, Reduction};
use gapforge::weight::parse_weight;
use gapforge::Error;
use serde_json::json;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullArgument = 1,
    InputError = 2,
    InvariantViolation = 3,
    SizeGuard = 4,
    Panic = 5,
}

impl From<&Error> for GfStatus {
    fn from(e: &Error) -> Self {
        match e.exit_code() {
            3 => GfStatus::InvariantViolation,
            4 => GfStatus::SizeGuard,
            _ => GfStatus::InputError,
        }
    }
}

/// Opaque handle to a built reduction (graph plus its gadget index).
pub struct GfReduction {
    inner: Reduction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(Error::from(e))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GfStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed as {what}"));
            GfStatus::NullArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            GfStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            GfStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Lib(Error::input(format!("{what} is not valid UTF-8"))))
}

unsafe fn write_str(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("output string"));
    }
    *out = CString::new(s).map_err(|_| Failure::Lib(Error::invariant("output contains a nul byte")))?.into_raw();
    Ok(())
}

unsafe fn handle<'a>(h: *const GfReduction) -> Result<&'a GfReduction, Failure> {
    h.as_ref().ok_or(Failure::Null("reduction handle"))
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library; valid until the next call.
#[no_mangle]
pub extern "C" fn gf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a reduction from MAX-E3-LIN2 text: the instance is balanced to
/// right-hand side `b` (0 gives the undirected graph, 1 the directed one,
/// using `lambda` such as `"1/8"`; `lambda` may be null for `b = 0`).
///
/// # Safety
/// String arguments must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_reduction_from_e3lin2(
    text: *const c_char,
    b: u8,
    seed: u64,
    lambda: *const c_char,
    out: *mut *mut GfReduction,
) -> GfStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("output handle"));
        }
        if b > 1 {
            return Err(Error::input(format!("b must be 0 or 1, got {b}")).into());
        }
        let inst = parse_e3lin2(read_str(text, "text")?)?;
        let h = build_hybrid(&balance_negations(&inst, b == 1), b == 1, seed)?;
        let lam = if b == 1 { Some(parse_weight(read_str(lambda, "lambda")?)?) } else { None };
        let inner = Reduction::build(&h, lam)?;
        *out = Box::into_raw(Box::new(GfReduction { inner }));
        Ok(())
    })
}

/// Loads a reduction file (as written by `forge to-tsp` / `to-atsp`).
///
/// # Safety
/// `json` must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_reduction_from_json(json: *const c_char, out: *mut *mut GfReduction) -> GfStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("output handle"));
        }
        let v: serde_json::Value = serde_json::from_str(read_str(json, "json")?)?;
        let inner = Reduction::from_json(&v)?;
        *out = Box::into_raw(Box::new(GfReduction { inner }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn gf_reduction_free(h: *mut GfReduction) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Reduction file JSON.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_reduction_to_json(h: *const GfReduction, out: *mut *mut c_char) -> GfStatus {
    guard(|| {
        let r = handle(h)?;
        write_str(out, r.inner.to_json().to_string())
    })
}

/// Vertex and edge counts of the reduction graph.
///
/// # Safety
/// `h` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_reduction_size(h: *const GfReduction, vertices: *mut usize, edges: *mut usize) -> GfStatus {
    guard(|| {
        let r = handle(h)?;
        if vertices.is_null() || edges.is_null() {
            return Err(Failure::Null("size output"));
        }
        *vertices = r.inner.graph().num_vertices();
        *edges = r.inner.graph().num_edges();
        Ok(())
    })
}

/// Builds a tour from an assignment file (`{"original": [...]}` or
/// `{"hybrid": [...]}`). Writes `{"summary": {...}, "tour": {...}}`.
///
/// # Safety
/// `h` must be a live handle, `assignment` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_reduction_tour(h: *const GfReduction, assignment: *const c_char, out: *mut *mut c_char) -> GfStatus {
    guard(|| {
        let r = handle(h)?;
        let f: AssignmentFile = serde_json::from_str(read_str(assignment, "assignment")?)?;
        let a = f.resolve(r.inner.hybrid())?;
        let c = r.inner.tour_from_assignment(&a)?;
        write_str(out, json!({"summary": c, "tour": c.tour.to_json()}).to_string())
    })
}

/// Extracts an assignment from tour JSON and writes
/// `{"hybrid": [...], "unsat", "dishonest_vars", "tour_cost", "allowance"}`.
///
/// # Safety
/// `h` must be a live handle, `tour` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_reduction_extract(h: *const GfReduction, tour: *const c_char, out: *mut *mut c_char) -> GfStatus {
    guard(|| {
        let r = handle(h)?;
        let v: serde_json::Value = serde_json::from_str(read_str(tour, "tour")?)?;
        let t = TourMultiset::from_json(r.inner.graph(), &v)?;
        let ex = r.inner.extract(&t)?;
        let bits: Vec<u8> = ex.assignment.iter().map(|&b| u8::from(b)).collect();
        let mut doc = serde_json::to_value(&ex)?;
        doc["hybrid"] = json!(bits);
        write_str(out, doc.to_string())
    })
}

/// Per-gadget credit report of a tour.
///
/// # Safety
/// `h` must be a live handle, `tour` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_reduction_audit(h: *const GfReduction, tour: *const c_char, out: *mut *mut c_char) -> GfStatus {
    guard(|| {
        let r = handle(h)?;
        let v: serde_json::Value = serde_json::from_str(read_str(tour, "tour")?)?;
        let t = TourMultiset::from_json(r.inner.graph(), &v)?;
        write_str(out, serde_json::to_string(&r.inner.audit(&t)?)?)
    })
}

/// Runs the end-to-end pipeline. `config` is a JSON object whose fields
/// default individually (null means all defaults). The report is written
/// even when a check fails; the status is then `InvariantViolation`.
///
/// # Safety
/// `config` must be null or nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_pipeline_run(config: *const c_char, out: *mut *mut c_char) -> GfStatus {
    guard(|| {
        let cfg: PipelineConfig = if config.is_null() { PipelineConfig::default() } else { serde_json::from_str(read_str(config, "config")?)? };
        let rep = run_pipeline(&cfg)?;
        write_str(out, rep.to_json_string())?;
        let failed = rep.failed_checks().next().map(|c| c.name.clone());
        match failed {
            Some(name) => Err(Error::invariant(format!("check {name} failed")).into()),
            None => Ok(()),
        }
    })
}

/// Exact tour on a distance matrix JSON (`{"entries": [["0","1/2"], ...]}`).
/// `method` 0 is Held-Karp, 1 permutation brute force.
///
/// # Safety
/// `matrix` must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_oracle(matrix: *const c_char, method: u8, out: *mut *mut c_char) -> GfStatus {
    guard(|| {
        let v: serde_json::Value = serde_json::from_str(read_str(matrix, "matrix")?)?;
        let m = DistanceMatrix::from_json(&v)?;
        let r = match method {
            0 => held_karp(&m)?,
            1 => brute_permutation(&m)?,
            other => return Err(Error::input(format!("unknown oracle method {other}")).into()),
        };
        write_str(out, serde_json::to_string(&r)?)
    })
}
