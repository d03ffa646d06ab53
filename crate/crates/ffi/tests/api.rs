use std::ffi::{CStr, CString};
use std::ptr;

use heat_entropy::h3::H3Params;
use heat_entropy_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(he_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn h3_handle_matches_library() {
    let mut h: *mut HeH3 = ptr::null_mut();
    assert_eq!(unsafe { he_h3_new(1.0, 0.0, 0.0, &mut h) }, HeStatus::Ok);
    assert!(!h.is_null());
    let p = H3Params::with_kappa(1.0).unwrap();

    let mut v = 0.0;
    assert_eq!(unsafe { he_h3_entropy(h, 1.0, &mut v) }, HeStatus::Ok);
    assert_eq!(v, p.entropy(1.0).unwrap());
    assert_eq!(unsafe { he_h3_entropy_rate(h, 10.0, &mut v) }, HeStatus::Ok);
    assert_eq!(v, p.entropy_rate(10.0).unwrap());
    assert_eq!(unsafe { he_h3_total_mass(h, 2.0, &mut v) }, HeStatus::Ok);
    assert!((v - 1.0).abs() < 1e-10);

    let mut rec = HeH3Record::default();
    assert_eq!(unsafe { he_h3_record(h, 1.0, &mut rec) }, HeStatus::Ok);
    assert_eq!(rec.i1, 2.0);
    assert_eq!(rec.envelopes_hold, 1);
    assert!(rec.eta_lower < rec.eta && rec.eta < rec.eta_upper);
    assert_eq!(last_error(), "");

    assert_eq!(unsafe { he_h3_entropy(h, -1.0, &mut v) }, HeStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    unsafe { he_h3_free(h) };
}

#[test]
fn invalid_arguments_and_nulls() {
    let mut h: *mut HeH3 = ptr::null_mut();
    assert_eq!(unsafe { he_h3_new(0.0, 0.0, 0.0, &mut h) }, HeStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("kappa"));
    assert_eq!(unsafe { he_h3_new(1.0, 0.0, 0.0, ptr::null_mut()) }, HeStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(unsafe { he_h3_entropy(ptr::null(), 1.0, &mut v) }, HeStatus::NullPointer);
    assert_eq!(unsafe { he_trace_len(ptr::null()) }, 0);
    unsafe {
        he_h3_free(ptr::null_mut());
        he_trace_free(ptr::null_mut());
        he_string_free(ptr::null_mut());
    }
    let mut r = 0.0;
    assert_eq!(unsafe { he_ricci_bound(1, 0.0, 1.0, 1.0, &mut r) }, HeStatus::Ok);
    assert_eq!(r, 0.25);
    assert_eq!(unsafe { he_ricci_bound(1, 0.0, 0.0, 1.0, &mut r) }, HeStatus::InvalidArgument);
}

#[test]
fn trace_handle() {
    let name = CString::new("circle").unwrap();
    let times = [0.05, 0.1, 0.5];
    let mut tr: *mut HeTrace = ptr::null_mut();
    assert_eq!(unsafe { he_trace_new(name.as_ptr(), times.as_ptr(), times.len(), &mut tr) }, HeStatus::Ok);
    assert_eq!(unsafe { he_trace_len(tr) }, 3);
    let mut pt = HeTracePoint::default();
    let mut prev = f64::NEG_INFINITY;
    for (i, &ti) in times.iter().enumerate() {
        assert_eq!(unsafe { he_trace_point(tr, i, &mut pt) }, HeStatus::Ok);
        assert_eq!(pt.t, ti);
        assert!(pt.entropy > prev);
        assert!((pt.rate_fd - pt.rate_direct).abs() <= 1e-4 * pt.rate_direct);
        prev = pt.entropy;
    }
    assert_eq!(unsafe { he_trace_point(tr, 3, &mut pt) }, HeStatus::InvalidArgument);
    let mut ok = 0;
    assert_eq!(unsafe { he_trace_bounds_hold(tr, &mut ok) }, HeStatus::Ok);
    assert_eq!(ok, 1);
    unsafe { he_trace_free(tr) };

    let bad = CString::new("disc").unwrap();
    assert_eq!(
        unsafe { he_trace_new(bad.as_ptr(), ptr::null(), 0, &mut tr) },
        HeStatus::InvalidArgument
    );
    let drift = CString::new("torus-drift").unwrap();
    assert_eq!(
        unsafe { he_trace_new(drift.as_ptr(), times.as_ptr(), 3, &mut tr) },
        HeStatus::Unsupported
    );
}

#[test]
fn verify_single_group() {
    let only = CString::new("sinh_ratio_ordering").unwrap();
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { he_verify(only.as_ptr(), &mut json) }, HeStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { he_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["sinh_ratio_ordering"]["pass"], true);

    let unknown = CString::new("nothing").unwrap();
    assert_eq!(unsafe { he_verify(unknown.as_ptr(), &mut json) }, HeStatus::InvalidArgument);
    assert!(json.is_null());
}
