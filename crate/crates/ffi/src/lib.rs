//! C interface to `arnoldi-agg`.
//!
//! Objects cross the boundary as opaque pointers created by `*_new`/`*_build`
//! style functions and released with the matching `*_free`. Every fallible
//! function returns an [`ArnaggStatus`]; on failure a description is kept per
//! thread and can be read with [`arnagg_last_error`]. Panics never unwind
//! into the caller: they are caught and reported as [`ArnaggStatus::Panic`].
//!
//! Vectors are passed as a pointer plus a length. Output buffers are filled
//! only when the call succeeds.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use arnoldi_agg::arnoldi::{self, persist, ArnoldiAggregation};
use arnoldi_agg::convergence::{run_adaptive, CriterionConfig, StopReason};
use arnoldi_agg::markov::sparse::{CsrMatrix, SparseStochasticMatrix};
use arnoldi_agg::markov::transient_naive;
use arnoldi_agg::models::builtin;
use arnoldi_agg::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArnaggStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidMatrix = 4,
    InvalidDistribution = 5,
    StateSpaceOverflow = 6,
    EigenSolver = 7,
    Io = 8,
    Parse = 9,
    Panic = 10,
}

/// Why an adaptive run stopped.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArnaggStopReason {
    CriterionMet = 0,
    InvariantSubspace = 1,
    MaxDimension = 2,
}

impl From<StopReason> for ArnaggStopReason {
    fn from(r: StopReason) -> Self {
        match r {
            StopReason::CriterionMet => ArnaggStopReason::CriterionMet,
            StopReason::InvariantSubspace => ArnaggStopReason::InvariantSubspace,
            StopReason::MaxDimension => ArnaggStopReason::MaxDimension,
        }
    }
}

/// Opaque row-stochastic sparse matrix.
pub struct ArnaggMatrix(SparseStochasticMatrix);

/// Opaque Arnoldi aggregation.
pub struct ArnaggAggregation(ArnoldiAggregation);

/// Summary of an adaptive run, filled by [`arnagg_run_adaptive`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ArnaggRunInfo {
    pub stop_reason: ArnaggStopReason,
    pub dimension: usize,
    /// NaN when no real eigenvector was available at the final dimension.
    pub criterion: f64,
    pub total_seconds: f64,
    pub criterion_seconds: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> ArnaggStatus {
    match err {
        Error::DimensionMismatch { .. } => ArnaggStatus::DimensionMismatch,
        Error::MalformedSparse(_)
        | Error::NotStochastic(_)
        | Error::NotGenerator(_)
        | Error::InvalidRate { .. } => ArnaggStatus::InvalidMatrix,
        Error::EmptyVector
        | Error::NonFinite(_)
        | Error::InvalidDistribution(_)
        | Error::ZeroInitialVector => ArnaggStatus::InvalidDistribution,
        Error::StateSpaceOverflow { .. } => ArnaggStatus::StateSpaceOverflow,
        Error::EigenSolver(_) => ArnaggStatus::EigenSolver,
        Error::Io(_) => ArnaggStatus::Io,
        Error::Parse { .. } | Error::Json(_) => ArnaggStatus::Parse,
        _ => ArnaggStatus::InvalidArgument,
    }
}

struct Failure(ArnaggStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ArnaggStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records failures and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ArnaggStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ArnaggStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            ArnaggStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `ptr` must be null or valid for `len` writes.
unsafe fn write_out(ptr: *mut f64, len: usize, data: &[f64]) -> Result<(), Failure> {
    if len != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            found: len,
        }
        .into());
    }
    if len > 0 {
        if ptr.is_null() {
            return Err(null("output buffer"));
        }
        std::slice::from_raw_parts_mut(ptr, len).copy_from_slice(data);
    }
    Ok(())
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn string(s: *const c_char, what: &str) -> Result<String, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map(str::to_owned).map_err(|_| {
        Failure(
            ArnaggStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

/// # Safety
/// `out` must be null or valid for one write.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// # Safety
/// `h` must be null or a live handle from this library.
unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null after a success.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn arnagg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn arnagg_status_name(status: ArnaggStatus) -> *const c_char {
    let s: &'static CStr = match status {
        ArnaggStatus::Ok => c"ok",
        ArnaggStatus::NullPointer => c"null pointer",
        ArnaggStatus::InvalidArgument => c"invalid argument",
        ArnaggStatus::DimensionMismatch => c"dimension mismatch",
        ArnaggStatus::InvalidMatrix => c"invalid matrix",
        ArnaggStatus::InvalidDistribution => c"invalid distribution",
        ArnaggStatus::StateSpaceOverflow => c"state space overflow",
        ArnaggStatus::EigenSolver => c"eigensolver failure",
        ArnaggStatus::Io => c"i/o error",
        ArnaggStatus::Parse => c"parse error",
        ArnaggStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Builds a row-stochastic matrix from CSR arrays (`row_offsets` has `n + 1` entries).
///
/// # Safety
/// The arrays must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn arnagg_matrix_from_csr(
    n: usize,
    row_offsets: *const usize,
    col_indices: *const usize,
    values: *const f64,
    nnz: usize,
    out: *mut *mut ArnaggMatrix,
) -> ArnaggStatus {
    guard(|| {
        let offsets = slice(row_offsets, n + 1, "row_offsets")?.to_vec();
        let cols = slice(col_indices, nnz, "col_indices")?.to_vec();
        let vals = slice(values, nnz, "values")?.to_vec();
        let csr = CsrMatrix::try_new(n, n, offsets, cols, vals)?;
        emit(out, ArnaggMatrix(SparseStochasticMatrix::new(csr)?))
    })
}

/// DTMC of a catalog model (generators are uniformised; `rate <= 0` selects the catalog rate).
///
/// `initial_state`, when non-null, receives the index of the model's initial state.
///
/// # Safety
/// `name` must be a NUL-terminated string; the pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn arnagg_matrix_from_model(
    name: *const c_char,
    rate: f64,
    out: *mut *mut ArnaggMatrix,
    initial_state: *mut usize,
) -> ArnaggStatus {
    guard(|| {
        let name = string(name, "name")?;
        let model = builtin(&name, None)?;
        let (p, _) = model.stochastic((rate > 0.0).then_some(rate))?;
        if !initial_state.is_null() {
            *initial_state = model.descriptor.initial_state;
        }
        emit(out, ArnaggMatrix(p))
    })
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn arnagg_matrix_size(m: *const ArnaggMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.n())
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn arnagg_matrix_free(m: *mut ArnaggMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `p_k = p₀P^k` by repeated products.
///
/// # Safety
/// `p0` and `out` must be valid for `n` entries.
#[no_mangle]
pub unsafe extern "C" fn arnagg_transient_naive(
    m: *const ArnaggMatrix,
    p0: *const f64,
    n: usize,
    k: usize,
    out: *mut f64,
) -> ArnaggStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        let v = transient_naive(slice(p0, n, "p0")?, &m.0, k)?;
        write_out(out, n, v.as_slice())
    })
}

/// Arnoldi aggregation of fixed dimension `j`.
///
/// # Safety
/// `p0` must be valid for `n` entries and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_build(
    m: *const ArnaggMatrix,
    p0: *const f64,
    n: usize,
    j: usize,
    out: *mut *mut ArnaggAggregation,
) -> ArnaggStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        let agg = arnoldi::build_aggregation(slice(p0, n, "p0")?, &m.0, j)?;
        emit(out, ArnaggAggregation(agg))
    })
}

/// Expands until the criterion value drops to `epsilon`.
///
/// `check_every = 0` selects the default cadence and `max_dimension = 0` means no cap.
/// Reaching the cap is not an error: inspect `info.stop_reason`.
///
/// # Safety
/// `p0` must be valid for `n` entries; `out` and `info` writable (`info` may be null).
#[no_mangle]
pub unsafe extern "C" fn arnagg_run_adaptive(
    m: *const ArnaggMatrix,
    p0: *const f64,
    n: usize,
    epsilon: f64,
    check_every: usize,
    max_dimension: usize,
    out: *mut *mut ArnaggAggregation,
    info: *mut ArnaggRunInfo,
) -> ArnaggStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        let mut cfg = CriterionConfig::new(epsilon);
        if check_every > 0 {
            cfg.check_every = check_every;
        }
        cfg.max_dimension = (max_dimension > 0).then_some(max_dimension);
        let run = run_adaptive(slice(p0, n, "p0")?, &m.0, &cfg)?;
        if !info.is_null() {
            *info = ArnaggRunInfo {
                stop_reason: run.stop_reason.into(),
                dimension: run.aggregation.dimension(),
                criterion: run.criterion.unwrap_or(f64::NAN),
                total_seconds: run.total_time.as_secs_f64(),
                criterion_seconds: run.criterion_time.as_secs_f64(),
            };
        }
        emit(out, ArnaggAggregation(run.aggregation))
    })
}

/// Dimension `j`, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live aggregation handle.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_dimension(a: *const ArnaggAggregation) -> usize {
    a.as_ref().map_or(0, |a| a.0.dimension())
}

/// Size `n` of the original chain, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live aggregation handle.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_states(a: *const ArnaggAggregation) -> usize {
    a.as_ref().map_or(0, |a| a.0.n())
}

/// Whether the Krylov space was invariant (the aggregation is exact).
///
/// # Safety
/// `a` must be null or a live aggregation handle.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_is_invariant(a: *const ArnaggAggregation) -> bool {
    a.as_ref().is_some_and(|a| a.0.is_invariant())
}

/// Approximate transient distribution `p̃_k` lifted to the full state space.
///
/// # Safety
/// `out` must be valid for `n` writes, `n` being the size of the chain.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_transient(
    a: *const ArnaggAggregation,
    k: usize,
    out: *mut f64,
    n: usize,
) -> ArnaggStatus {
    guard(|| {
        let a = handle(a, "aggregation")?;
        write_out(out, n, a.0.approx_transient(k).as_slice())
    })
}

/// `‖p̃_k − p_k‖₁` via the closed form in the boundary pair.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_error(
    a: *const ArnaggAggregation,
    m: *const ArnaggMatrix,
    k: usize,
    out: *mut f64,
) -> ArnaggStatus {
    guard(|| {
        let a = handle(a, "aggregation")?;
        let m = handle(m, "matrix")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = arnoldi::closed_form_error(&a.0, &m.0, k)?;
        Ok(())
    })
}

/// Writes the aggregation directory (`H.mtx`, `Q.mtx`, `pi0.txt`, `meta.json`).
///
/// # Safety
/// `a` must be live and `dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_save(
    a: *const ArnaggAggregation,
    dir: *const c_char,
) -> ArnaggStatus {
    guard(|| {
        let a = handle(a, "aggregation")?;
        let dir = PathBuf::from(string(dir, "dir")?);
        persist::save(&a.0, dir)?;
        Ok(())
    })
}

/// Reads a directory written by [`arnagg_aggregation_save`].
///
/// # Safety
/// `dir` must be a NUL-terminated path and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_load(
    dir: *const c_char,
    out: *mut *mut ArnaggAggregation,
) -> ArnaggStatus {
    guard(|| {
        let dir = PathBuf::from(string(dir, "dir")?);
        emit(out, ArnaggAggregation(persist::load(dir)?))
    })
}

/// # Safety
/// `a` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn arnagg_aggregation_free(a: *mut ArnaggAggregation) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn arnagg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
