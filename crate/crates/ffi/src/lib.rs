//! C ABI over `forest-balance`.
//!
//! Objects cross the boundary as opaque handles made by the constructor
//! functions and released with the matching `fb_*_free`. Fallible calls
//! return an `FbStatus` and write results through out-pointers; on failure
//! `fb_last_error_message` describes what went wrong on the calling thread.
//! Panics never unwind into C: they are caught and reported as
//! `FB_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use forest_balance::generators::{c0_colouring, random_balanced_colouring};
use forest_balance::oracle::exact_min_imbalance_guarded;
use forest_balance::solver::{solve, Certificate, SolveResult, SolverConfig, Strategy};
use forest_balance::{ColouredCompleteGraph, Error, Forest};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parity = 3,
    SignSearchFailure = 4,
    Refused = 5,
    Precondition = 6,
    Parse = 7,
    Io = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbStrategy {
    Auto = 0,
    InterpolateOnly = 1,
    GreedyStar = 2,
    LocalSearch = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbCertificate {
    Optimal = 0,
    Interpolation = 1,
    DeltaPlusOne = 2,
    GreedyStar = 3,
    Heuristic = 4,
}

/// Solver settings; start from `fb_solve_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FbSolveOptions {
    pub seed: u64,
    pub max_restarts: usize,
    pub sample_budget: usize,
    pub exact_threshold: usize,
    pub strategy: FbStrategy,
}

/// A ±1 colouring of `K_n`.
pub struct FbColouring(ColouredCompleteGraph);

/// A forest on `n` labelled vertices.
pub struct FbForest(Forest);

/// The outcome of `fb_solve`.
pub struct FbSolveResult(SolveResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FbStatus {
    match e {
        Error::InvalidInput(_) => FbStatus::InvalidInput,
        Error::Parity { .. } => FbStatus::Parity,
        Error::SignSearchFailure { .. } => FbStatus::SignSearchFailure,
        Error::Refused { .. } => FbStatus::Refused,
        Error::Precondition(_) => FbStatus::Precondition,
        Error::Parse { .. } => FbStatus::Parse,
        Error::Io(_) => FbStatus::Io,
        _ => FbStatus::Internal,
    }
}

/// Runs `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), (FbStatus, String)>) -> FbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FbStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FbStatus::Internal
        }
    }
}

fn lib<T>(r: forest_balance::Result<T>) -> Result<T, (FbStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (FbStatus, String) {
    (FbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (FbStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), (FbStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, (FbStatus, String)> {
    if s.is_null() {
        return Err(null("text"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (FbStatus::InvalidInput, format!("text is not UTF-8: {e}")))
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread; never free it.
#[no_mangle]
pub extern "C" fn fb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// A uniformly random colouring with exactly half the edges red.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_colouring_random_balanced(n: usize, seed: u64, out: *mut *mut FbColouring) -> FbStatus {
    guard(|| store(out, FbColouring(lib(random_balanced_colouring(n, seed))?)))
}

/// The two-class colouring that forces spanning-star imbalance `(n - 2)/2`; `n % 4 == 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_colouring_c0(n: usize, out: *mut *mut FbColouring) -> FbStatus {
    guard(|| store(out, FbColouring(lib(c0_colouring(n))?)))
}

/// Parses the text format: `n`, then row `i` holds `i` characters `R`/`B`.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_colouring_from_text(source: *const c_char, out: *mut *mut FbColouring) -> FbStatus {
    guard(|| store(out, FbColouring(lib(ColouredCompleteGraph::from_text(text(source)?))?)))
}

/// # Safety
/// `c` must come from an `fb_colouring_*` constructor and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fb_colouring_free(c: *mut FbColouring) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fb_colouring_n(c: *const FbColouring) -> usize {
    c.as_ref().map_or(0, |c| c.0.n())
}

/// Writes `+1` (red) or `-1` (blue) for the edge `ij`.
///
/// # Safety
/// `c` must be a live handle and `sign` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_colouring_sign(c: *const FbColouring, i: usize, j: usize, sign: *mut i32) -> FbStatus {
    guard(|| {
        let g = &deref(c, "colouring")?.0;
        if i >= g.n() || j >= g.n() || i == j {
            return Err((FbStatus::InvalidInput, format!("({i}, {j}) is not an edge of K_{}", g.n())));
        }
        if sign.is_null() {
            return Err(null("sign"));
        }
        *sign = g.sign(i, j) as i32;
        Ok(())
    })
}

/// Whether the colour sum over all edges is zero. False for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fb_colouring_is_balanced(c: *const FbColouring) -> bool {
    c.as_ref().is_some_and(|c| c.0.is_balanced())
}

/// Builds a forest from `edge_count` pairs stored flat in `edges` (`2 * edge_count` entries).
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (or be null when
/// `edge_count` is 0); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_forest_from_edges(
    n: usize,
    edges: *const usize,
    edge_count: usize,
    out: *mut *mut FbForest,
) -> FbStatus {
    guard(|| {
        let flat: &[usize] = if edge_count == 0 {
            &[]
        } else if edges.is_null() {
            return Err(null("edges"));
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let pairs = flat.chunks_exact(2).map(|p| (p[0], p[1]));
        store(out, FbForest(lib(Forest::new(n, pairs))?))
    })
}

/// Parses the text format: `n m`, then `m` lines `u v`.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_forest_from_text(source: *const c_char, out: *mut *mut FbForest) -> FbStatus {
    guard(|| store(out, FbForest(lib(Forest::from_text(text(source)?))?)))
}

/// # Safety
/// `f` must come from an `fb_forest_*` constructor and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fb_forest_free(f: *mut FbForest) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fb_forest_n(f: *const FbForest) -> usize {
    f.as_ref().map_or(0, |f| f.0.n())
}

/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fb_forest_max_degree(f: *const FbForest) -> usize {
    f.as_ref().map_or(0, |f| f.0.max_degree())
}

#[no_mangle]
pub extern "C" fn fb_solve_options_default() -> FbSolveOptions {
    let d = SolverConfig::default();
    FbSolveOptions {
        seed: d.seed,
        max_restarts: d.max_restarts,
        sample_budget: d.sample_budget,
        exact_threshold: d.exact_threshold,
        strategy: FbStrategy::Auto,
    }
}

/// Finds a low-imbalance embedding of `forest` into `colouring`.
///
/// # Safety
/// Handles must be live; `options` may be null for defaults; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_solve(
    forest: *const FbForest,
    colouring: *const FbColouring,
    options: *const FbSolveOptions,
    out: *mut *mut FbSolveResult,
) -> FbStatus {
    guard(|| {
        let f = &deref(forest, "forest")?.0;
        let g = &deref(colouring, "colouring")?.0;
        let o = options.as_ref().copied().unwrap_or_else(|| fb_solve_options_default());
        let cfg = SolverConfig {
            seed: o.seed,
            max_restarts: o.max_restarts,
            sample_budget: o.sample_budget,
            exact_threshold: o.exact_threshold,
            strategy: match o.strategy {
                FbStrategy::Auto => Strategy::Auto,
                FbStrategy::InterpolateOnly => Strategy::InterpolateOnly,
                FbStrategy::GreedyStar => Strategy::GreedyStar,
                FbStrategy::LocalSearch => Strategy::LocalSearch,
            },
            ..SolverConfig::default()
        };
        store(out, FbSolveResult(lib(solve(f, g, &cfg))?))
    })
}

/// # Safety
/// `r` must come from `fb_solve` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fb_solve_result_free(r: *mut FbSolveResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// `|sum|` of the embedding, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fb_solve_result_achieved(r: *const FbSolveResult) -> u64 {
    r.as_ref().map_or(0, |r| r.0.achieved)
}

/// Signed colour sum of the embedding, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fb_solve_result_sum(r: *const FbSolveResult) -> i64 {
    r.as_ref().map_or(0, |r| r.0.embedding.sum())
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fb_solve_result_within_theorem(r: *const FbSolveResult) -> bool {
    r.as_ref().is_some_and(|r| r.0.within_theorem)
}

/// The guarantee class behind the result; `Heuristic` for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fb_solve_result_certificate(r: *const FbSolveResult) -> FbCertificate {
    match r.as_ref().map(|r| &r.0.certificate) {
        Some(Certificate::Optimal) => FbCertificate::Optimal,
        Some(Certificate::Interpolation { .. }) => FbCertificate::Interpolation,
        Some(Certificate::DeltaPlusOne { .. }) => FbCertificate::DeltaPlusOne,
        Some(Certificate::GreedyStar { .. }) => FbCertificate::GreedyStar,
        Some(Certificate::Heuristic) | None => FbCertificate::Heuristic,
    }
}

/// Copies the vertex map (forest vertex `v` goes to host vertex `map[v]`) into `map`.
///
/// # Safety
/// `r` must be a live handle; `map` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fb_solve_result_map(r: *const FbSolveResult, map: *mut usize, len: usize) -> FbStatus {
    guard(|| {
        let src = deref(r, "result")?.0.embedding.map();
        if len < src.len() {
            return Err((FbStatus::InvalidInput, format!("buffer holds {len}, need {}", src.len())));
        }
        if map.is_null() {
            return Err(null("map"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), map, src.len());
        Ok(())
    })
}

/// The guarantee `Δ/2 + 9` (for `Δ >= n/2` or `Δ <= 15`) or its square-root form otherwise.
#[no_mangle]
pub extern "C" fn fb_theorem3_bound(n: usize, max_degree: usize) -> f64 {
    forest_balance::bounds::theorem3_bound(n, max_degree)
}

/// Exact minimum imbalance by enumeration, refused above `max_n` vertices.
/// `map` may be null; otherwise it receives a witness and must hold `n` entries.
///
/// # Safety
/// Handles must be live; `value` must be valid for writes; `map` null or valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn fb_exact_min_imbalance(
    forest: *const FbForest,
    colouring: *const FbColouring,
    max_n: usize,
    value: *mut u64,
    map: *mut usize,
) -> FbStatus {
    guard(|| {
        let f = &deref(forest, "forest")?.0;
        let g = &deref(colouring, "colouring")?.0;
        if value.is_null() {
            return Err(null("value"));
        }
        let m = lib(exact_min_imbalance_guarded(f, g, max_n))?;
        *value = m.value;
        if !map.is_null() {
            ptr::copy_nonoverlapping(m.witness.map().as_ptr(), map, f.n());
        }
        Ok(())
    })
}
