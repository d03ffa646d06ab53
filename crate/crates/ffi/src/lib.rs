//! C ABI over `heat_entropy`.
//!
//! Every fallible function returns an [`HeStatus`]; on failure the message is
//! available from [`he_last_error`] on the same thread until the next call.
//! Handles are created by `*_new` functions and released by the matching
//! `*_free`. No function unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use heat_entropy::bounds::{check_bounds, ricci_bound_rhs, BoundReport};
use heat_entropy::h3::H3Params;
use heat_entropy::spectral::fixtures;
use heat_entropy::spectral::EntropyTrace;
use heat_entropy::verify::{self, VerifyOptions};
use heat_entropy::{Error, QuadratureSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    NotConverged = 3,
    NonFinite = 4,
    PositivityLoss = 5,
    TruncationInsufficient = 6,
    Unsupported = 7,
    CheckFailed = 8,
    Panic = 9,
}

/// Hyperbolic heat kernel parameters.
pub struct HeH3 {
    params: H3Params,
}

/// Entropy trace of a built-in fixture together with its bound reports.
pub struct HeTrace {
    trace: EntropyTrace,
    reports: Vec<BoundReport>,
}

/// One row of the hyperbolic entropy table; envelope ends and `eta` values
/// are converted to plain doubles and may overflow to infinity.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HeH3Record {
    pub t: f64,
    pub entropy: f64,
    pub i1: f64,
    pub i2: f64,
    pub rate_direct: f64,
    pub rate_fd: f64,
    pub eta: f64,
    pub eta_lower: f64,
    pub eta_upper: f64,
    pub etap: f64,
    pub etap_lower: f64,
    pub etap_upper: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    /// 1 when both quantities lie strictly inside their envelopes.
    pub envelopes_hold: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HeTracePoint {
    pub t: f64,
    pub entropy: f64,
    pub rate_direct: f64,
    pub rate_fd: f64,
    pub fisher: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> HeStatus {
    match err {
        Error::InvalidParameter(_) => HeStatus::InvalidArgument,
        Error::NonFiniteIntegrand { .. } => HeStatus::NonFinite,
        Error::NotConverged { .. } => HeStatus::NotConverged,
        Error::UnsupportedMoment { .. } | Error::Unsupported(_) => HeStatus::Unsupported,
        Error::TruncationInsufficient(_) => HeStatus::TruncationInsufficient,
        Error::PositivityLoss { .. } => HeStatus::PositivityLoss,
    }
}

/// Runs `f`, converting errors and panics to a status and recording the message.
fn guard<F: FnOnce() -> Result<(), (HeStatus, String)>>(f: F) -> HeStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HeStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(&message);
            HeStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (HeStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HeStatus, String) {
    (HeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HeStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (HeStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn he_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn he_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates parameters for curvature `-kappa^2`. Non-positive `rtol` or
/// `atol` select the defaults (1e-10, 1e-14).
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn he_h3_new(kappa: f64, rtol: f64, atol: f64, out: *mut *mut HeH3) -> HeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let defaults = QuadratureSpec::default();
        let spec = QuadratureSpec::new(
            if rtol > 0.0 { rtol } else { defaults.relative_tolerance },
            if atol > 0.0 { atol } else { defaults.absolute_tolerance },
        )
        .map_err(lib_err)?;
        let params = H3Params::new(kappa, spec).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(HeH3 { params }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`he_h3_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn he_h3_free(handle: *mut HeH3) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn h3_scalar(
    handle: *const HeH3,
    out: *mut f64,
    f: impl FnOnce(&H3Params) -> heat_entropy::Result<f64>,
) -> HeStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = f(&h.params).map_err(lib_err)?;
        Ok(())
    })
}

/// Entropy `-int h log h` at time `t`.
///
/// # Safety
/// `handle` must be live; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_h3_entropy(handle: *const HeH3, t: f64, out: *mut f64) -> HeStatus {
    h3_scalar(handle, out, |p| p.entropy(t))
}

/// Entropy rate at time `t`.
///
/// # Safety
/// `handle` must be live; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_h3_entropy_rate(handle: *const HeH3, t: f64, out: *mut f64) -> HeStatus {
    h3_scalar(handle, out, |p| p.entropy_rate(t))
}

/// Total mass of the kernel at time `t` (one up to quadrature error).
///
/// # Safety
/// `handle` must be live; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_h3_total_mass(handle: *const HeH3, t: f64, out: *mut f64) -> HeStatus {
    h3_scalar(handle, out, |p| p.total_mass(t))
}

/// Full table row at time `t`.
///
/// # Safety
/// `handle` must be live; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_h3_record(handle: *const HeH3, t: f64, out: *mut HeH3Record) -> HeStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = h.params.record(t).map_err(lib_err)?;
        *out = HeH3Record {
            t: r.t,
            entropy: r.entropy,
            i1: r.i1,
            i2: r.i2,
            rate_direct: r.rate_direct,
            rate_fd: r.rate_fd,
            eta: r.eta.value(),
            eta_lower: r.eta_envelope.lower.value(),
            eta_upper: r.eta_envelope.upper.value(),
            etap: r.eta_prime.value(),
            etap_lower: r.eta_prime_envelope.lower.value(),
            etap_upper: r.eta_prime_envelope.upper.value(),
            band_lo: r.band_lo,
            band_hi: r.band_hi,
            envelopes_hold: r.envelopes_hold() as i32,
        };
        Ok(())
    })
}

/// Traces the built-in fixture `manifold` ("circle", "torus", "sphere",
/// "torus-drift"). When `times` is non-null the `len` times replace the
/// default grid (not for "torus-drift", which is time-stepped).
///
/// # Safety
/// `manifold` must be a NUL-terminated string; `times` null or valid for
/// `len` reads; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_trace_new(
    manifold: *const c_char,
    times: *const f64,
    len: usize,
    out: *mut *mut HeTrace,
) -> HeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let name = read_str(manifold, "manifold")?;
        let mut fixture = fixtures::by_name(name)
            .ok_or_else(|| (HeStatus::InvalidArgument, format!("unknown manifold {name:?}")))?
            .map_err(lib_err)?;
        if !times.is_null() {
            if fixture.field.manifold.is_drifted() {
                return Err((HeStatus::Unsupported, "torus-drift uses its fixed step schedule".into()));
            }
            if len == 0 {
                return Err((HeStatus::InvalidArgument, "empty time grid".into()));
            }
            fixture = fixture.with_times(std::slice::from_raw_parts(times, len).to_vec());
        }
        let trace = fixture.trace().map_err(lib_err)?;
        let reports = check_bounds(&trace, &fixture.field.manifold, &fixture.field).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(HeTrace { trace, reports }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`he_trace_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn he_trace_free(handle: *mut HeTrace) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of points in the trace; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn he_trace_len(handle: *const HeTrace) -> usize {
    handle.as_ref().map_or(0, |h| h.trace.times.len())
}

/// # Safety
/// `handle` must be live; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_trace_point(handle: *const HeTrace, index: usize, out: *mut HeTracePoint) -> HeStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let tr = &h.trace;
        if index >= tr.times.len() {
            return Err((
                HeStatus::InvalidArgument,
                format!("index {index} out of range for {} points", tr.times.len()),
            ));
        }
        *out = HeTracePoint {
            t: tr.times[index],
            entropy: tr.entropy[index],
            rate_direct: tr.rate_direct[index],
            rate_fd: tr.rate_fd[index],
            fisher: tr.fisher[index],
        };
        Ok(())
    })
}

/// Writes 1 to `out` when every applicable bound holds at every trace point.
/// Returns [`HeStatus::CheckFailed`] (with `out` set to 0) otherwise.
///
/// # Safety
/// `handle` must be live; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_trace_bounds_hold(handle: *const HeTrace, out: *mut i32) -> HeStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let failing: Vec<&str> = h
            .reports
            .iter()
            .filter(|r| !r.all_satisfied())
            .map(|r| r.bound_name.as_str())
            .collect();
        *out = failing.is_empty() as i32;
        if failing.is_empty() {
            Ok(())
        } else {
            Err((HeStatus::CheckFailed, format!("violated: {}", failing.join(", "))))
        }
    })
}

/// The curvature-dimension bound on the entropy rate.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_ricci_bound(n: usize, k: f64, q0: f64, t: f64, out: *mut f64) -> HeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ricci_bound_rhs(n, k, q0, t).map_err(lib_err)?;
        Ok(())
    })
}

/// Runs the verification checks (one group when `only` is non-null) and
/// returns the JSON report in `*json_out`, to be released with
/// [`he_string_free`]. Returns [`HeStatus::CheckFailed`] when a check fails;
/// the report is produced either way.
///
/// # Safety
/// `only` null or NUL-terminated; `json_out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn he_verify(only: *const c_char, json_out: *mut *mut c_char) -> HeStatus {
    guard(|| {
        if json_out.is_null() {
            return Err(null("json_out"));
        }
        *json_out = ptr::null_mut();
        let only = if only.is_null() { None } else { Some(read_str(only, "only")?) };
        let report = verify::run(&VerifyOptions::default(), only).map_err(lib_err)?;
        let text = heat_entropy::format::to_json(&report).map_err(lib_err)?;
        *json_out = CString::new(text)
            .map_err(|_| (HeStatus::InvalidArgument, "report contains NUL".into()))?
            .into_raw();
        if report.all_passed() {
            Ok(())
        } else {
            Err((HeStatus::CheckFailed, format!("failed: {}", report.failing().join(", "))))
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn he_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
