//! C interface to `gvbound`.
//!
//! Every function returns a [`GvbStatus`]; on failure a description is
//! available from [`gvb_last_error_message`] on the same thread. Systems and
//! curves are opaque handles released with their `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gvbound::curve::Segment;
use gvbound::graphs::parse_graph;
use gvbound::mr::Bound;
use gvbound::{Curve, Error, SolverConfig, System, SystemSpec};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GvbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    MalformedGraph = 3,
    Unsupported = 4,
    NoConvergence = 5,
    NumericFailure = 6,
    Io = 7,
    Panic = 8,
}

impl From<&Error> for GvbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameters(_) | Error::Domain(_) => GvbStatus::InvalidArgument,
            Error::Malformed(_) | Error::LabelLength { .. } | Error::Nondeterministic { .. } => {
                GvbStatus::MalformedGraph
            }
            Error::Unsupported(_) => GvbStatus::Unsupported,
            Error::NoConvergence { .. } => GvbStatus::NoConvergence,
            Error::NumericFailure(_) => GvbStatus::NumericFailure,
            Error::Io(_) => GvbStatus::Io,
        }
    }
}

/// Solver settings; obtain defaults from [`gvb_solver_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GvbSolverConfig {
    pub power_tol: f64,
    pub power_max_iter: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub shift: f64,
    pub x_lo: f64,
    pub x_hi: f64,
}

impl From<SolverConfig> for GvbSolverConfig {
    fn from(c: SolverConfig) -> Self {
        GvbSolverConfig {
            power_tol: c.power_tol,
            power_max_iter: c.power_max_iter,
            newton_tol: c.newton_tol,
            newton_max_iter: c.newton_max_iter,
            shift: c.shift,
            x_lo: c.x_lo,
            x_hi: c.x_hi,
        }
    }
}

impl From<GvbSolverConfig> for SolverConfig {
    fn from(c: GvbSolverConfig) -> Self {
        SolverConfig {
            power_tol: c.power_tol,
            power_max_iter: c.power_max_iter,
            newton_tol: c.newton_tol,
            newton_max_iter: c.newton_max_iter,
            shift: c.shift,
            x_lo: c.x_lo,
            x_hi: c.x_hi,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GvbSegment {
    Gv = 0,
    A = 1,
    B = 2,
    Tail = 3,
    Simple = 4,
}

impl From<Segment> for GvbSegment {
    fn from(s: Segment) -> Self {
        match s {
            Segment::Gv => GvbSegment::Gv,
            Segment::A => GvbSegment::A,
            Segment::B => GvbSegment::B,
            Segment::Tail => GvbSegment::Tail,
            Segment::Simple => GvbSegment::Simple,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GvbCurvePoint {
    pub segment: GvbSegment,
    pub param: f64,
    pub delta: f64,
    pub rate: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct GvbGvPoint {
    pub delta: f64,
    pub y: f64,
    pub t_tilde: f64,
    pub rate: f64,
    /// True when `delta` is at or beyond the largest distance with positive rate.
    pub clamped: bool,
}

/// Which bound a GV-MR point realises.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GvbBound {
    Mr = 0,
    LowerBound = 1,
    Zero = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GvbMrPoint {
    pub delta: f64,
    pub p: f64,
    /// Infinite when the point sits at the limit `x -> ∞`.
    pub x: f64,
    pub y: f64,
    pub rate: f64,
    pub bound: GvbBound,
}

/// Opaque constrained system with its solver settings.
pub struct GvbSystem {
    system: System,
    config: SolverConfig,
}

/// Opaque rate-distance curve.
pub struct GvbCurve {
    curve: Curve,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard<F: FnOnce() -> Result<(), (GvbStatus, String)>>(f: F) -> GvbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            GvbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GvbStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (GvbStatus, String) {
    (GvbStatus::from(&e), e.to_string())
}

fn null(name: &str) -> (GvbStatus, String) {
    (GvbStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (GvbStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GvbStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// # Safety
/// `p` must be null or point to a live value of type `T`.
unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (GvbStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

fn weight(w: i32) -> Option<u32> {
    (w >= 0).then_some(w as u32)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn gvb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gvb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `out` must be null or point to writable memory for one config.
#[no_mangle]
pub unsafe extern "C" fn gvb_solver_config_default(out: *mut GvbSolverConfig) -> GvbStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = SolverConfig::default().into();
        Ok(())
    })
}

fn open(system: System, out: *mut *mut GvbSystem) -> Result<(), (GvbStatus, String)> {
    let handle = Box::new(GvbSystem {
        system,
        config: SolverConfig::default(),
    });
    // SAFETY: checked non-null by callers
    unsafe { *out = Box::into_raw(handle) };
    Ok(())
}

/// Builds a system from `swcc:L,w`, `rll:d,k`, `secc:L,w` or `file:<path>`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn gvb_system_new(spec: *const c_char, out: *mut *mut GvbSystem) -> GvbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let spec = read_str(spec, "spec")?;
        open(System::parse(spec).map_err(lib_err)?, out)
    })
}

/// Builds a system from graph JSON text:
/// `{"s": 1, "states": ["a"], "edges": [{"from": "a", "to": "a", "label": "0"}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn gvb_system_from_json(json: *const c_char, out: *mut *mut GvbSystem) -> GvbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let text = read_str(json, "json")?;
        let graph = parse_graph(text).map_err(lib_err)?;
        let validation = gvbound::graphs::validate(&graph);
        let system = System {
            spec: SystemSpec::File("<inline>".into()),
            graph,
            validation,
        };
        open(system, out)
    })
}

/// # Safety
/// `sys` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gvb_system_free(sys: *mut GvbSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle and `config` a readable config.
#[no_mangle]
pub unsafe extern "C" fn gvb_system_set_config(sys: *mut GvbSystem, config: *const GvbSolverConfig) -> GvbStatus {
    guard(|| {
        let sys = sys.as_mut().ok_or_else(|| null("sys"))?;
        let cfg: SolverConfig = (*deref(config, "config")?).into();
        cfg.validate().map_err(lib_err)?;
        sys.config = cfg;
        Ok(())
    })
}

/// Number of states and edges and the label length.
///
/// # Safety
/// `sys` must be a live handle; the outputs must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn gvb_system_shape(
    sys: *const GvbSystem,
    states: *mut usize,
    edges: *mut usize,
    label_bits: *mut usize,
) -> GvbStatus {
    guard(|| {
        let g = &deref(sys, "sys")?.system.graph;
        if let Some(p) = states.as_mut() {
            *p = g.num_states();
        }
        if let Some(p) = edges.as_mut() {
            *p = g.edges().len();
        }
        if let Some(p) = label_bits.as_mut() {
            *p = g.s();
        }
        Ok(())
    })
}

/// Capacity in bits per symbol.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gvb_capacity(sys: *const GvbSystem, out: *mut f64) -> GvbStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = sys.system.capacity(&sys.config).map_err(lib_err)?;
        Ok(())
    })
}

/// GV bound at relative distance `delta`.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gvb_gv_fixed(sys: *const GvbSystem, delta: f64, out: *mut GvbGvPoint) -> GvbStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = sys.system.gv_fixed(delta, &sys.config).map_err(lib_err)?;
        *out = GvbGvPoint {
            delta: p.delta,
            y: p.y,
            t_tilde: p.t_tilde,
            rate: p.rate,
            clamped: p.clamped,
        };
        Ok(())
    })
}

/// GV-MR bound at relative distance `delta`. `weight` selects the marked
/// labels by Hamming weight; pass a negative value for the default subset.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gvb_mr_fixed(
    sys: *const GvbSystem,
    delta: f64,
    weight: i32,
    out: *mut GvbMrPoint,
) -> GvbStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = sys
            .system
            .mr_fixed(delta, self::weight(weight), &sys.config)
            .map_err(lib_err)?;
        *out = GvbMrPoint {
            delta: p.delta,
            p: p.p,
            x: p.x,
            y: p.y,
            rate: p.rate,
            bound: match p.bound {
                Bound::Mr => GvbBound::Mr,
                Bound::LowerBound => GvbBound::LowerBound,
                Bound::Zero => GvbBound::Zero,
            },
        };
        Ok(())
    })
}

unsafe fn store_curve(curve: Curve, out: *mut *mut GvbCurve) {
    *out = Box::into_raw(Box::new(GvbCurve { curve }));
}

/// GV curve with `n` parameter values, sorted by distance.
///
/// # Safety
/// `sys` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn gvb_gv_curve(sys: *const GvbSystem, n: usize, out: *mut *mut GvbCurve) -> GvbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let sys = deref(sys, "sys")?;
        let c = sys.system.gv_curve(n, &sys.config).map_err(lib_err)?;
        store_curve(c, out);
        Ok(())
    })
}

/// GV-MR curve with `n` points; `weight` as in [`gvb_mr_fixed`].
///
/// # Safety
/// `sys` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn gvb_mr_curve(
    sys: *const GvbSystem,
    n: usize,
    weight: i32,
    out: *mut *mut GvbCurve,
) -> GvbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let sys = deref(sys, "sys")?;
        let c = sys
            .system
            .mr_curve(n, self::weight(weight), &sys.config)
            .map_err(lib_err)?;
        store_curve(c.curve, out);
        Ok(())
    })
}

/// Number of points in a curve; zero for a null handle.
///
/// # Safety
/// `curve` must be null or a live curve handle.
#[no_mangle]
pub unsafe extern "C" fn gvb_curve_len(curve: *const GvbCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.curve.points.len())
}

/// Largest distance with positive rate.
///
/// # Safety
/// `curve` must be a live curve handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gvb_curve_delta_max(curve: *const GvbCurve, out: *mut f64) -> GvbStatus {
    guard(|| {
        let c = deref(curve, "curve")?;
        *out.as_mut().ok_or_else(|| null("out"))? = c.curve.delta_max;
        Ok(())
    })
}

/// Point `index` of a curve.
///
/// # Safety
/// `curve` must be a live curve handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gvb_curve_point(curve: *const GvbCurve, index: usize, out: *mut GvbCurvePoint) -> GvbStatus {
    guard(|| {
        let c = deref(curve, "curve")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = c.curve.points.get(index).ok_or_else(|| {
            (
                GvbStatus::InvalidArgument,
                format!("index {index} out of range for {} points", c.curve.points.len()),
            )
        })?;
        *out = GvbCurvePoint {
            segment: p.segment.into(),
            param: p.param,
            delta: p.delta,
            rate: p.rate,
        };
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a curve handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gvb_curve_free(curve: *mut GvbCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}
