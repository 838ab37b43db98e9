use std::ffi::{CStr, CString};
use std::ptr;

use gvbound_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(gvb_last_error_message()) }.to_string_lossy().into_owned()
}

fn open(spec: &str) -> *mut GvbSystem {
    let spec = CString::new(spec).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { gvb_system_new(spec.as_ptr(), &mut sys) }, GvbStatus::Ok);
    assert!(!sys.is_null());
    sys
}

#[test]
fn capacity_and_gv_point() {
    let sys = open("swcc:3,2");
    let mut cap = 0.0;
    assert_eq!(unsafe { gvb_capacity(sys, &mut cap) }, GvbStatus::Ok);
    assert!((cap - 0.551).abs() < 1e-3);
    let mut p = GvbGvPoint::default();
    assert_eq!(unsafe { gvb_gv_fixed(sys, 0.1, &mut p) }, GvbStatus::Ok);
    assert!((p.y - 0.238).abs() < 1e-3);
    assert!(!p.clamped);
    assert!(last_error().is_empty());
    let (mut states, mut edges, mut bits) = (0, 0, 0);
    assert_eq!(unsafe { gvb_system_shape(sys, &mut states, &mut edges, &mut bits) }, GvbStatus::Ok);
    assert_eq!((states, bits), (3, 1));
    assert!(edges > 0);
    unsafe { gvb_system_free(sys) };
}

#[test]
fn curve_handles() {
    let sys = open("secc:3,2");
    let mut curve = ptr::null_mut();
    assert_eq!(unsafe { gvb_gv_curve(sys, 11, &mut curve) }, GvbStatus::Ok);
    let n = unsafe { gvb_curve_len(curve) };
    assert_eq!(n, 12);
    let mut dm = 0.0;
    assert_eq!(unsafe { gvb_curve_delta_max(curve, &mut dm) }, GvbStatus::Ok);
    assert_eq!(dm, 3.0 / 8.0);
    let mut pt = GvbCurvePoint { segment: GvbSegment::Gv, param: 0.0, delta: 0.0, rate: 0.0 };
    assert_eq!(unsafe { gvb_curve_point(curve, 0, &mut pt) }, GvbStatus::Ok);
    assert!((pt.rate - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(unsafe { gvb_curve_point(curve, n, &mut pt) }, GvbStatus::InvalidArgument);
    assert!(last_error().contains("out of range"));
    unsafe { gvb_curve_free(curve) };

    let mut mr = ptr::null_mut();
    assert_eq!(unsafe { gvb_mr_curve(sys, 10, 2, &mut mr) }, GvbStatus::Ok);
    assert!(unsafe { gvb_curve_len(mr) } >= 10);
    unsafe { gvb_curve_free(mr) };

    let mut p = GvbMrPoint { delta: 0.0, p: 0.0, x: 0.0, y: 0.0, rate: 0.0, bound: GvbBound::Mr };
    assert_eq!(unsafe { gvb_mr_fixed(sys, 0.3, -1, &mut p) }, GvbStatus::Ok);
    assert_eq!(p.bound, GvbBound::LowerBound);
    assert!(p.x.is_infinite());
    unsafe { gvb_system_free(sys) };
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("swcc:3").unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { gvb_system_new(bad.as_ptr(), &mut sys) }, GvbStatus::InvalidArgument);
    assert!(sys.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { gvb_system_new(ptr::null(), &mut sys) }, GvbStatus::NullPointer);
    assert_eq!(unsafe { gvb_capacity(ptr::null(), ptr::null_mut()) }, GvbStatus::NullPointer);

    let json = CString::new(r#"{"s":1,"states":["a"],"edges":[{"from":"a","to":"a","label":"0"},{"from":"a","to":"a","label":"0"}]}"#).unwrap();
    assert_eq!(unsafe { gvb_system_from_json(json.as_ptr(), &mut sys) }, GvbStatus::MalformedGraph);

    let sys = open("swcc:3,2");
    let mut p = GvbGvPoint::default();
    assert_eq!(unsafe { gvb_gv_fixed(sys, 2.0, &mut p) }, GvbStatus::InvalidArgument);
    let mut cfg = GvbSolverConfig { power_tol: 0.0, power_max_iter: 0, newton_tol: 0.0, newton_max_iter: 0, shift: 0.0, x_lo: 0.0, x_hi: 0.0 };
    assert_eq!(unsafe { gvb_system_set_config(sys, &cfg) }, GvbStatus::InvalidArgument);
    assert_eq!(unsafe { gvb_solver_config_default(&mut cfg) }, GvbStatus::Ok);
    cfg.power_max_iter = 2;
    assert_eq!(unsafe { gvb_system_set_config(sys, &cfg) }, GvbStatus::Ok);
    let mut cap = 0.0;
    assert_eq!(unsafe { gvb_capacity(sys, &mut cap) }, GvbStatus::NoConvergence);
    unsafe { gvb_system_free(sys) };
    unsafe { gvb_system_free(ptr::null_mut()) };
}

#[test]
fn json_graph_and_version() {
    let json = CString::new(r#"{"s":1,"states":["a"],"edges":[{"from":"a","to":"a","label":"0"},{"from":"a","to":"a","label":"1"}]}"#).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { gvb_system_from_json(json.as_ptr(), &mut sys) }, GvbStatus::Ok);
    let mut cap = 0.0;
    assert_eq!(unsafe { gvb_capacity(sys, &mut cap) }, GvbStatus::Ok);
    assert_eq!(cap, 1.0);
    unsafe { gvb_system_free(sys) };
    let v = unsafe { CStr::from_ptr(gvb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
