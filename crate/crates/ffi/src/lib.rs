//! C interface to the verification engine.
//!
//! Every entry point returns a `QpStatus`. Objects are opaque handles released with their
//! `*_free` function. The message of the last failure on the calling thread is available
//! from `qp_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qpainleve::acceptance::acceptance_report;
use qpainleve::error::Error;
use qpainleve::params::ParamSet;
use qpainleve::report::{Report, Status};
use qpainleve::task::{run, TaskKind, VerifyTask};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Ok = 0,
    Usage = 1,
    Parse = 2,
    UnsupportedMode = 3,
    DegeneratePoint = 4,
    Domain = 5,
    DivisionRemainder = 6,
    Precision = 7,
    QuadratureHealth = 8,
    Internal = 9,
    NullPointer = 10,
    Utf8 = 11,
    Panic = 12,
}

/// Overall outcome of a report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpOutcome {
    Pass = 0,
    Fail = 1,
    ResolvedWithCorrection = 2,
}

/// A verification request being assembled.
pub struct QpTask {
    task: VerifyTask,
}

/// A finished report with its JSON rendering.
pub struct QpReport {
    report: Report,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_of(e: &Error) -> QpStatus {
    match e {
        Error::Usage(_) => QpStatus::Usage,
        Error::Parse(_) => QpStatus::Parse,
        Error::UnsupportedMode(_) => QpStatus::UnsupportedMode,
        Error::DegeneratePoint(_) => QpStatus::DegeneratePoint,
        Error::Domain(_) => QpStatus::Domain,
        Error::DivisionRemainder(_) => QpStatus::DivisionRemainder,
        Error::Precision(_) => QpStatus::Precision,
        Error::QuadratureHealth(_) => QpStatus::QuadratureHealth,
        Error::Internal(_) => QpStatus::Internal,
    }
}

fn guard<F: FnOnce() -> Result<(), QpStatus>>(f: F) -> QpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QpStatus::Ok,
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("panic inside the verification engine");
            QpStatus::Panic
        }
    }
}

fn fail(e: Error) -> QpStatus {
    set_error(&e.to_string());
    code_of(&e)
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, QpStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(QpStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        QpStatus::Utf8
    })
}

fn boxed_report(report: Report) -> *mut QpReport {
    let json = CString::new(report.to_json()).unwrap_or_default();
    Box::into_raw(Box::new(QpReport { report, json }))
}

/// Message of the last failed call on this thread; empty if none. Valid until the next failure.
#[no_mangle]
pub extern "C" fn qp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates a task of the given kind (`weyl`, `eom`, `zero-curvature`, `radial`, `gauge`,
/// `table1`, `n1`, `pde-symbolic`, `pde-numeric`, `oracle-moments`).
///
/// # Safety
/// `kind` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_task_new(kind: *const c_char, out: *mut *mut QpTask) -> QpStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return Err(QpStatus::NullPointer);
        }
        let kind: TaskKind = text(kind)?.parse().map_err(fail)?;
        *out = Box::into_raw(Box::new(QpTask { task: VerifyTask::new(kind, ParamSet::default()) }));
        Ok(())
    })
}

/// Sets a parameter (`family`, `N`, `m`, `hbar`, `b`, `t`, ...) or an option
/// (`trials`, `seed`, `prec`, `gauge_a`, `mode`, `kmax`, `tol`, `timings`).
///
/// # Safety
/// `task` must come from `qp_task_new`; `key` and `value` must be valid C strings.
#[no_mangle]
pub unsafe extern "C" fn qp_task_set(task: *mut QpTask, key: *const c_char, value: *const c_char) -> QpStatus {
    guard(|| {
        let t = task.as_mut().ok_or_else(|| {
            set_error("null task");
            QpStatus::NullPointer
        })?;
        t.task.set(text(key)?, text(value)?).map_err(fail)
    })
}

/// Runs the task. On success `*out` receives a report to release with `qp_report_free`.
///
/// # Safety
/// `task` must come from `qp_task_new` and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_task_run(task: *const QpTask, out: *mut *mut QpReport) -> QpStatus {
    guard(|| {
        let t = task.as_ref().ok_or_else(|| {
            set_error("null task");
            QpStatus::NullPointer
        })?;
        if out.is_null() {
            set_error("null output pointer");
            return Err(QpStatus::NullPointer);
        }
        *out = boxed_report(run(&t.task).map_err(fail)?);
        Ok(())
    })
}

/// # Safety
/// `task` must come from `qp_task_new` (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qp_task_free(task: *mut QpTask) {
    if !task.is_null() {
        drop(Box::from_raw(task));
    }
}

/// Runs acceptance criteria (`criteria[0..len]`, or all when `len` is 0).
///
/// # Safety
/// `criteria` must point to `len` integers (or be null when `len` is 0); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qp_suite_acceptance(
    criteria: *const u32,
    len: usize,
    seed: u64,
    prec: u32,
    out: *mut *mut QpReport,
) -> QpStatus {
    guard(|| {
        if out.is_null() || (criteria.is_null() && len > 0) {
            set_error("null pointer argument");
            return Err(QpStatus::NullPointer);
        }
        let only: &[u32] = if len == 0 { &[] } else { std::slice::from_raw_parts(criteria, len) };
        *out = boxed_report(acceptance_report(only, seed, prec, false).map_err(fail)?);
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn qp_report_outcome(report: *const QpReport) -> QpOutcome {
    match report.as_ref().map(|r| r.report.status) {
        Some(Status::Pass) => QpOutcome::Pass,
        Some(Status::ResolvedWithCorrection) => QpOutcome::ResolvedWithCorrection,
        _ => QpOutcome::Fail,
    }
}

/// # Safety
/// `report` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn qp_report_check_count(report: *const QpReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.checks.len())
}

/// Number of failed checks.
///
/// # Safety
/// `report` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn qp_report_failed_count(report: *const QpReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.checks.iter().filter(|c| !c.passed()).count())
}

/// JSON rendering owned by the report.
///
/// # Safety
/// `report` must come from this library; the string lives as long as the report.
#[no_mangle]
pub unsafe extern "C" fn qp_report_json(report: *const QpReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `report` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qp_report_free(report: *mut QpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
