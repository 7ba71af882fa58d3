//! C ABI over the `trineumann` crate.
//!
//! Objects cross the boundary as opaque handles created by `tn_*_new` or a
//! solver call and released with the matching `tn_*_free`. Every fallible
//! function returns a [`TnStatus`]; on failure the message is kept per thread
//! and can be copied out with [`tn_last_error_message`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use trineumann::bounds::{self, BoundReport};
use trineumann::fem::{self, EigenSolution, SymmetryTag};
use trineumann::geometry::{IsoscelesSpec, Triangle};
use trineumann::special_fn;
use trineumann::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Degenerate = 4,
    NoConvergence = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Reflection class of an eigenfunction.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TnSymmetry {
    Symmetric = 0,
    Antisymmetric = 1,
    Mixed = 2,
    NotApplicable = 3,
}

impl From<SymmetryTag> for TnSymmetry {
    fn from(t: SymmetryTag) -> Self {
        match t {
            SymmetryTag::Symmetric => TnSymmetry::Symmetric,
            SymmetryTag::Antisymmetric => TnSymmetry::Antisymmetric,
            SymmetryTag::None => TnSymmetry::Mixed,
            SymmetryTag::NotApplicable => TnSymmetry::NotApplicable,
        }
    }
}

/// Closed-form bounds on the first nonzero eigenvalue.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TnBounds {
    pub pi_squared_diameter_lower: f64,
    pub j11_diameter_lower: f64,
    pub j11_perimeter_lower: f64,
    pub pi_perimeter_lower: f64,
    pub cheng_upper: f64,
    pub sum_of_squares_upper: f64,
}

/// Opaque triangle.
pub struct TnTriangle(Triangle);

/// Opaque list of discrete eigenpairs from one mesh level.
pub struct TnSpectrum(Vec<EigenSolution>);

/// Opaque bound audit report.
pub struct TnReport(BoundReport);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TnStatus {
    match e {
        Error::Domain(_) => TnStatus::Domain,
        Error::Degenerate(_) => TnStatus::Degenerate,
        Error::InvalidArgument(_) | Error::NotReflectionCompatible(_) => TnStatus::InvalidArgument,
        Error::Convergence(_) | Error::SolverNonConvergence { .. } => TnStatus::NoConvergence,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => TnStatus::Io,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), (TnStatus, String)>>(f: F) -> TnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside trineumann".into());
            TnStatus::Panic
        }
    }
}

fn lib<T>(r: trineumann::Result<T>) -> Result<T, (TnStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TnStatus, String) {
    (TnStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TnStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (TnStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn levels<'a>(p: *const u32, n: usize) -> Result<Vec<usize>, (TnStatus, String)> {
    if p.is_null() {
        return Err(null("levels"));
    }
    let s: &'a [u32] = slice::from_raw_parts(p, n);
    Ok(s.iter().map(|&l| l as usize).collect())
}

/// Copy the calling thread's last error message, NUL-terminated, into `buf`.
/// Returns the message length in bytes without the terminator; when that is
/// `>= len` the copy was truncated.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tn_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Triangle from six coordinates `x0, y0, x1, y1, x2, y2`.
///
/// # Safety
/// `xy` must point to six doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_triangle_new(xy: *const f64, out: *mut *mut TnTriangle) -> TnStatus {
    guard(|| {
        let xy = deref(xy, "coordinates")?;
        let t = lib(Triangle::from_flat(slice::from_raw_parts(xy, 6)))?;
        write(out, Box::into_raw(Box::new(TnTriangle(t))))
    })
}

/// Isosceles triangle with apex angle `aperture` (radians) and equal sides `leg`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_triangle_isosceles(aperture: f64, leg: f64, out: *mut *mut TnTriangle) -> TnStatus {
    guard(|| {
        let spec = lib(IsoscelesSpec::new(aperture, leg))?;
        write(out, Box::into_raw(Box::new(TnTriangle(spec.triangle()))))
    })
}

/// # Safety
/// `t` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tn_triangle_free(t: *mut TnTriangle) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_triangle_diameter(t: *const TnTriangle, out: *mut f64) -> TnStatus {
    guard(|| write(out, deref(t, "triangle")?.0.diameter()))
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_triangle_bounds(t: *const TnTriangle, out: *mut TnBounds) -> TnStatus {
    guard(|| {
        let t = &deref(t, "triangle")?.0;
        write(
            out,
            TnBounds {
                pi_squared_diameter_lower: bounds::pw_diameter_lower(t),
                j11_diameter_lower: bounds::thm_diameter_lower(t),
                j11_perimeter_lower: bounds::perimeter_lower(t),
                pi_perimeter_lower: bounds::convex_perimeter_lower(t),
                cheng_upper: bounds::cheng_upper(t),
                sum_of_squares_upper: bounds::sum_of_squares_upper(t),
            },
        )
    })
}

/// First `k` nonzero Neumann eigenpairs on the level-`level` mesh.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_solve(t: *const TnTriangle, level: u32, k: u32, out: *mut *mut TnSpectrum) -> TnStatus {
    guard(|| {
        let t = &deref(t, "triangle")?.0;
        let sols = match t.as_isosceles() {
            Some((spec, _)) => lib(fem::solve_isosceles(&spec, level as usize, k as usize))?.1,
            None => lib(fem::neumann_spectrum(t, level as usize, k as usize))?,
        };
        write(out, Box::into_raw(Box::new(TnSpectrum(sols))))
    })
}

/// # Safety
/// `s` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn tn_spectrum_len(s: *const TnSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `s` must be a live handle; `value` and `symmetry` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_spectrum_get(
    s: *const TnSpectrum,
    index: usize,
    value: *mut f64,
    symmetry: *mut TnSymmetry,
) -> TnStatus {
    guard(|| {
        let s = &deref(s, "spectrum")?.0;
        let sol = s
            .get(index)
            .ok_or_else(|| (TnStatus::InvalidArgument, format!("index {index} out of range 0..{}", s.len())))?;
        write(value, sol.eigenvalue)?;
        write(symmetry, sol.symmetry.into())
    })
}

/// # Safety
/// `s` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tn_spectrum_free(s: *mut TnSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Extrapolated first nonzero eigenvalue from `n_levels` mesh levels, each
/// twice the previous one.
///
/// # Safety
/// `t` must be a live handle, `levels` must point to `n_levels` integers,
/// `value` and `error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_fundamental_tone(
    t: *const TnTriangle,
    levels_ptr: *const u32,
    n_levels: usize,
    value: *mut f64,
    error: *mut f64,
) -> TnStatus {
    guard(|| {
        let t = &deref(t, "triangle")?.0;
        let lv = levels(levels_ptr, n_levels)?;
        let r = lib(bounds::fundamental_tone(t, &lv))?;
        write(value, r.tone.value)?;
        write(error, r.tone.error_estimate)
    })
}

/// Evaluate all bounds against an extrapolated eigenvalue.
///
/// # Safety
/// As [`tn_fundamental_tone`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_audit(
    t: *const TnTriangle,
    levels_ptr: *const u32,
    n_levels: usize,
    out: *mut *mut TnReport,
) -> TnStatus {
    guard(|| {
        let t = &deref(t, "triangle")?.0;
        let lv = levels(levels_ptr, n_levels)?;
        let r = lib(bounds::audit(t, &lv))?;
        write(out, Box::into_raw(Box::new(TnReport(r))))
    })
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_report_chain_ok(r: *const TnReport, out: *mut bool) -> TnStatus {
    guard(|| write(out, deref(r, "report")?.0.chain_ok))
}

/// Serialize the report as JSON into `buf` (NUL-terminated). `needed`
/// receives the JSON length in bytes; when `len <= *needed` nothing is
/// copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `r` must be a live handle, `buf` null or `len` writable bytes, `needed` writable.
#[no_mangle]
pub unsafe extern "C" fn tn_report_json(r: *const TnReport, buf: *mut c_char, len: usize, needed: *mut usize) -> TnStatus {
    guard(|| {
        let r = &deref(r, "report")?.0;
        let json = lib(serde_json::to_string(r).map_err(Error::from))?;
        write(needed, json.len())?;
        if buf.is_null() || len <= json.len() {
            return Err((TnStatus::BufferTooSmall, format!("{} bytes needed", json.len() + 1)));
        }
        ptr::copy_nonoverlapping(json.as_ptr(), buf as *mut u8, json.len());
        *buf.add(json.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tn_report_free(r: *mut TnReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// `index`-th positive zero of `J_order` (order 0 or 1, index from 1).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_bessel_j_zero(order: u32, index: u32, out: *mut f64) -> TnStatus {
    guard(|| write(out, lib(special_fn::bessel_j_zero(order, index as usize))?))
}

/// First positive zero of `J'_nu`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_bessel_jprime_zero(nu: f64, out: *mut f64) -> TnStatus {
    guard(|| write(out, lib(special_fn::bessel_jprime_zero(nu))?))
}

/// Order at which the first zero of `J'_nu` equals `j_{1,1}`.
#[no_mangle]
pub extern "C" fn tn_jprime_crossing() -> f64 {
    special_fn::jprime_crossing()
}
