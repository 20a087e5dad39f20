//! C interface to `quasiblade`.
//!
//! Objects cross the boundary as opaque handles created by `qb_*_new` or
//! `qb_*` constructors and released with the matching `qb_*_free`. Every
//! fallible call returns a [`QbStatus`]; on failure the message is kept per
//! thread and read with [`qb_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use quasiblade::geometry::{Contour, Point2};
use quasiblade::harmonic::C64;
use quasiblade::pipeline::{parse_config, run_pipeline, write_artifacts, RunResult};
use quasiblade::planar::{
    solve_blade, solve_modified, BladeSolution, SolveOptions, VelocityDistribution,
};
use quasiblade::positioning::least_squares_shift;
use quasiblade::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    InconsistentData = 5,
    SolveFailed = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

pub struct QbDistribution {
    inner: VelocityDistribution,
}

pub struct QbBladeSolution {
    inner: BladeSolution,
}

pub struct QbRun {
    inner: RunResult,
    report: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QbStatus {
    match e {
        Error::Io { .. } => QbStatus::Io,
        Error::Json(_)
        | Error::Csv { .. }
        | Error::MissingField(_)
        | Error::NotPowerOfTwo { .. } => QbStatus::Parse,
        Error::BadValue { .. } | Error::CountMismatch(..) | Error::EmptyPlot => {
            QbStatus::InvalidArgument
        }
        Error::BadSamples(_)
        | Error::InconsistentDistribution(_)
        | Error::DegenerateContour(_)
        | Error::MultivaluedAntiderivative(_)
        | Error::AnsatzInconsistent(_)
        | Error::GluingUnsupportedInLinearMode => QbStatus::InconsistentData,
        _ => QbStatus::SolveFailed,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), QbStatus>) -> QbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QbStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            QbStatus::Panic
        }
    }
}

fn fail(e: Error) -> QbStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> QbStatus {
    set_error(&format!("{what} is null"));
    QbStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, QbStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        QbStatus::InvalidArgument
    })
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], QbStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, QbStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a velocity distribution from `n` samples of arc length `s` and
/// speed `v`.
///
/// # Safety
/// `s` and `v` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_distribution_new(
    s: *const f64,
    v: *const f64,
    n: usize,
    total_length: f64,
    branch_first: usize,
    branch_second: usize,
    v_inf: f64,
    incidence: f64,
    out: *mut *mut QbDistribution,
) -> QbStatus {
    guard(|| {
        let s = slice_arg(s, n, "s")?.to_vec();
        let v = slice_arg(v, n, "v")?.to_vec();
        let out = out_arg(out, "out")?;
        let d = VelocityDistribution::new(
            s,
            v,
            total_length,
            [branch_first, branch_second],
            v_inf,
            incidence,
        )
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(QbDistribution { inner: d }));
        Ok(())
    })
}

/// Reads a velocity distribution from a JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_distribution_read_json(
    path: *const c_char,
    out: *mut *mut QbDistribution,
) -> QbStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_arg(out, "out")?;
        let d = VelocityDistribution::read_json(path).map_err(fail)?;
        *out = Box::into_raw(Box::new(QbDistribution { inner: d }));
        Ok(())
    })
}

/// Number of samples.
///
/// # Safety
/// `d` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qb_distribution_len(d: *const QbDistribution) -> usize {
    d.as_ref().map_or(0, |d| d.inner.len())
}

/// # Safety
/// `d` must be a handle from this library or null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_distribution_free(d: *mut QbDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Solves the inverse problem for one blade. With `w1 != 0` the modified
/// problem is solved instead. The contour starts at `(x0, y0)`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_solve_blade(
    d: *const QbDistribution,
    n_boundary: usize,
    n_contour: usize,
    x0: f64,
    y0: f64,
    w1: f64,
    out: *mut *mut QbBladeSolution,
) -> QbStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("distribution"))?;
        let out = out_arg(out, "out")?;
        let opts = SolveOptions {
            n_boundary,
            n_contour,
            z_start: C64::new(x0, y0),
        };
        let sol = if w1 == 0.0 {
            solve_blade(&d.inner, opts)
        } else {
            solve_modified(&d.inner, w1, opts)
        }
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(QbBladeSolution { inner: sol }));
        Ok(())
    })
}

/// Number of contour nodes.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qb_solution_contour_len(s: *const QbBladeSolution) -> usize {
    s.as_ref().map_or(0, |s| s.inner.contour.len())
}

/// Copies the contour as interleaved `x, y` pairs into `xy`, which holds
/// `capacity` doubles.
///
/// # Safety
/// `s` must be a live handle; `xy` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qb_solution_contour(
    s: *const QbBladeSolution,
    xy: *mut f64,
    capacity: usize,
) -> QbStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("solution"))?;
        if xy.is_null() {
            return Err(null("xy"));
        }
        let pts = s.inner.contour.points();
        if capacity < 2 * pts.len() {
            set_error(&format!("need {} doubles, got {capacity}", 2 * pts.len()));
            return Err(QbStatus::BufferTooSmall);
        }
        let buf = std::slice::from_raw_parts_mut(xy, 2 * pts.len());
        for (i, p) in pts.iter().enumerate() {
            buf[2 * i] = p.x;
            buf[2 * i + 1] = p.y;
        }
        Ok(())
    })
}

/// Closure defect `[re, im]`, speed-at-infinity defect and circulation
/// after correction.
///
/// # Safety
/// `s` must be a live handle; `out` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qb_solution_report(s: *const QbBladeSolution, out: *mut f64) -> QbStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("solution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = &s.inner.report;
        let buf = std::slice::from_raw_parts_mut(out, 4);
        buf.copy_from_slice(&[
            r.closure_defect[0],
            r.closure_defect[1],
            r.vinf_defect,
            s.inner.correspondence.circulation(),
        ]);
        Ok(())
    })
}

/// # Safety
/// `s` must be a handle from this library or null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_solution_free(s: *mut QbBladeSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

unsafe fn contour_arg(
    x: *const f64,
    y: *const f64,
    n: usize,
    what: &str,
) -> Result<Contour, QbStatus> {
    let x = slice_arg(x, n, what)?;
    let y = slice_arg(y, n, what)?;
    Contour::new(
        x.iter().zip(y).map(|(&a, &b)| Point2::new(a, b)).collect(),
        false,
    )
    .map_err(fail)
}

/// Least-squares translation placing the second point set on the first.
///
/// # Safety
/// All four arrays must hold `n` doubles; `dx`, `dy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_least_squares_shift(
    x1: *const f64,
    y1: *const f64,
    x2: *const f64,
    y2: *const f64,
    n: usize,
    dx: *mut f64,
    dy: *mut f64,
) -> QbStatus {
    guard(|| {
        let c1 = contour_arg(x1, y1, n, "first contour")?;
        let c2 = contour_arg(x2, y2, n, "second contour")?;
        let dx = out_arg(dx, "dx")?;
        let dy = out_arg(dy, "dy")?;
        let s = least_squares_shift(&c1, &c2).map_err(fail)?;
        *dx = s.dx;
        *dy = s.dy;
        Ok(())
    })
}

/// Runs the design pipeline from a configuration file. Artifacts are
/// written when `out_dir` is non-null. `all_pass` receives whether every
/// verdict passed.
///
/// # Safety
/// `config_path` must be a NUL-terminated string, `out_dir` one or null;
/// `all_pass` and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_run_config(
    config_path: *const c_char,
    out_dir: *const c_char,
    all_pass: *mut bool,
    out: *mut *mut QbRun,
) -> QbStatus {
    guard(|| {
        let path = str_arg(config_path, "config_path")?;
        let dir = if out_dir.is_null() {
            None
        } else {
            Some(str_arg(out_dir, "out_dir")?)
        };
        let all_pass = out_arg(all_pass, "all_pass")?;
        let out = out_arg(out, "out")?;
        let cfg = parse_config(path).map_err(fail)?;
        let result = run_pipeline(&cfg);
        if let Some(dir) = dir {
            write_artifacts(&result, &cfg.formats, Path::new(dir)).map_err(fail)?;
        }
        *all_pass = result.report.all_pass;
        let report = CString::new(result.report.to_json()).expect("report has no NUL");
        *out = Box::into_raw(Box::new(QbRun {
            inner: result,
            report,
        }));
        Ok(())
    })
}

/// Number of sections in the run.
///
/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qb_run_section_count(r: *const QbRun) -> usize {
    r.as_ref().map_or(0, |r| r.inner.sections.len())
}

/// JSON run report, owned by the handle.
///
/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qb_run_report_json(r: *const QbRun) -> *const c_char {
    r.as_ref().map_or(std::ptr::null(), |r| r.report.as_ptr())
}

/// # Safety
/// `r` must be a handle from this library or null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_run_free(r: *mut QbRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
