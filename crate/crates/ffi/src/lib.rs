//! C ABI for the `bilap` solvers.
//!
//! Every function returns a [`BlStatus`]; on failure a message is available
//! from [`bl_last_error`] on the calling thread. Results that own memory are
//! returned through opaque handles or heap strings that the caller releases
//! with the matching `*_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bilap::cap::{self, CapSpec};
use bilap::harness::{self, HarnessConfig};
use bilap::ritz::{self, ProblemKind, ProblemSpec, SpectralResult};
use bilap::{harmonic, wentzell};

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    SolverFailure = 3,
    NonConvergence = 4,
    Panic = 5,
}

/// Ball eigenproblems accepted by [`bl_ritz_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlProblemKind {
    PSteklov = 0,
    QSteklov = 1,
    XiSteklov = 2,
    Wentzell = 3,
    GammaNavier = 4,
    LambdaNavier = 5,
    Clamped = 6,
    Buckling = 7,
    LapDirichlet = 8,
    LapNeumann = 9,
}

fn problem_kind(code: i32) -> Option<ProblemKind> {
    usize::try_from(code).ok().and_then(|i| ProblemKind::ALL.get(i).copied())
}

/// First eigenvalues of a cap solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BlCapValues {
    pub lambda1: f64,
    pub gamma1: f64,
    pub lambda_big1: f64,
    /// Largest relative change under node refinement by 16.
    pub refinement_change: f64,
    pub converged: bool,
}

/// Opaque result of [`bl_ritz_solve`].
pub struct BlSpectrum {
    result: SpectralResult,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Outcome = Result<(), (BlStatus, String)>;

fn guard(f: impl FnOnce() -> Outcome) -> BlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            BlStatus::Panic
        }
    }
}

fn invalid(msg: impl ToString) -> (BlStatus, String) {
    (BlStatus::InvalidArgument, msg.to_string())
}

fn null(name: &str) -> (BlStatus, String) {
    (BlStatus::NullPointer, format!("{name} is null"))
}

fn to_c(s: String) -> Result<CString, (BlStatus, String)> {
    CString::new(s).map_err(|e| (BlStatus::SolverFailure, e.to_string()))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn bl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Dimension of the harmonic homogeneous polynomials of degree `k` in `R^n`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn bl_mu(n: u32, k: u32, out: *mut u64) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        bilap::poly::check_dim(n as usize).map_err(invalid)?;
        *out = harmonic::mu(n as usize, k);
        Ok(())
    })
}

/// Closed-form Wentzell eigenvalue `k^2 (n + 2k) + beta k (k + n - 2)`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn bl_wentzell_eigenvalue(n: u32, beta: f64, k: u32, out: *mut f64) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        bilap::poly::check_dim(n as usize).map_err(invalid)?;
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(invalid(format!("beta must be finite and nonnegative, got {beta}")));
        }
        *out = wentzell::eigenvalue(n as usize, beta, k);
        Ok(())
    })
}

/// Rayleigh-Ritz solve on the ball of radius `radius`; `kind` is a
/// [`BlProblemKind`] value. On success `*out` receives a handle to release
/// with [`bl_spectrum_free`].
///
/// # Safety
/// `out` must be null or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bl_ritz_solve(
    kind: i32,
    n: u32,
    radius: f64,
    degree: u32,
    beta: f64,
    out: *mut *mut BlSpectrum,
) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let kind = problem_kind(kind).ok_or_else(|| invalid(format!("unknown problem kind {kind}")))?;
        let spec = ProblemSpec::new(kind, n as usize)
            .with_radius(radius)
            .with_degree(degree)
            .with_beta(beta);
        spec.validate().map_err(invalid)?;
        let result = ritz::solve(&spec).map_err(|e| (BlStatus::SolverFailure, e.to_string()))?;
        let json = to_c(serde_json::to_string(&result).map_err(|e| (BlStatus::SolverFailure, e.to_string()))?)?;
        *out = Box::into_raw(Box::new(BlSpectrum { result, json }));
        Ok(())
    })
}

/// Number of reported eigenvalues (with multiplicity); 0 for null.
///
/// # Safety
/// `h` must be null or a live handle from [`bl_ritz_solve`].
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_len(h: *const BlSpectrum) -> usize {
    h.as_ref().map_or(0, |s| s.result.eigenvalues.len())
}

/// Eigenvalue `index` (ascending, with multiplicity).
///
/// # Safety
/// `h` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_eigenvalue(h: *const BlSpectrum, index: usize, out: *mut f64) -> BlStatus {
    guard(|| {
        let s = h.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = s
            .result
            .eigenvalues
            .get(index)
            .ok_or_else(|| invalid(format!("index {index} out of range")))?;
        *out = *v;
        Ok(())
    })
}

/// Dimension of the denominator kernel removed by the solver.
///
/// # Safety
/// `h` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_deflation_rank(h: *const BlSpectrum, out: *mut usize) -> BlStatus {
    guard(|| {
        let s = h.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.result.deflation_rank;
        Ok(())
    })
}

/// Full result as JSON, owned by the handle; null for a null handle.
///
/// # Safety
/// `h` must be null or a live handle. The string dies with the handle.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_json(h: *const BlSpectrum) -> *const c_char {
    h.as_ref().map_or(ptr::null(), |s| s.json.as_ptr())
}

/// Release a handle from [`bl_ritz_solve`]. Null is ignored.
///
/// # Safety
/// `h` must be null or a live handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_free(h: *mut BlSpectrum) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Collocation solve on a geodesic cap (`curvature` 1, 0 or -1) sweeping
/// angular modes `0..=ell_max`. Returns `NonConvergence` (with `*out`
/// filled) when the values move by more than 1e-8 under refinement.
///
/// # Safety
/// `out` must be null or point to writable memory for one `BlCapValues`.
#[no_mangle]
pub unsafe extern "C" fn bl_cap_solve(
    n: u32,
    curvature: i32,
    theta: f64,
    nodes: u32,
    ell_max: u32,
    out: *mut BlCapValues,
) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = CapSpec {
            n: n as usize,
            curvature,
            theta,
            ell_max,
            nodes: nodes as usize,
        };
        spec.validate().map_err(invalid)?;
        let r = cap::solve(&spec).map_err(|e| (BlStatus::SolverFailure, e.to_string()))?;
        *out = BlCapValues {
            lambda1: r.lambda1,
            gamma1: r.gamma1,
            lambda_big1: r.lambda_big1,
            refinement_change: r.refinement_change,
            converged: r.converged,
        };
        if r.converged {
            Ok(())
        } else {
            Err((
                BlStatus::NonConvergence,
                format!("change {:e} under node refinement", r.refinement_change),
            ))
        }
    })
}

/// Exact certificates of every Wentzell eigenfunction basis element with
/// `k <= kmax`, as a JSON array. Release `*out` with [`bl_string_free`].
///
/// # Safety
/// `out` must be null or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bl_certify_json(n: u32, beta: f64, kmax: u32, out: *mut *mut c_char) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let records = wentzell::certify_all(n as usize, beta, kmax).map_err(invalid)?;
        let text = serde_json::to_string(&records).map_err(|e| (BlStatus::SolverFailure, e.to_string()))?;
        *out = to_c(text)?.into_raw();
        Ok(())
    })
}

/// Run the bound report. `config` is null (defaults) or flat `key=value`
/// text. `*out` receives the JSON report (release with [`bl_string_free`]),
/// `*all_pass` whether every check passed.
///
/// # Safety
/// `config` must be null or NUL-terminated; `out` and `all_pass` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn bl_verify_json(config: *const c_char, out: *mut *mut c_char, all_pass: *mut bool) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if all_pass.is_null() {
            return Err(null("all_pass"));
        }
        *out = ptr::null_mut();
        let cfg = if config.is_null() {
            HarnessConfig::default()
        } else {
            let text = CStr::from_ptr(config).to_str().map_err(invalid)?;
            HarnessConfig::from_text(text).map_err(invalid)?
        };
        let report = harness::run_all(&cfg);
        *all_pass = report.all_pass();
        *out = to_c(report.to_json())?.into_raw();
        Ok(())
    })
}

/// Release a string returned through an out-parameter. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
