//! C interface to the qevolve solvers.
//!
//! Every fallible function returns a [`QeStatus`]; on failure a message is
//! available from [`qe_last_error`] until the next call on the same thread.
//! Objects are handed out as opaque pointers and must be released with the
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qevolve::config::ExperimentConfig;
use qevolve::operators::{decompose_laplacian_1d, expect_operator, Boundary, DecomposedOperator};
use qevolve::runner::{run_config, Mode, Report};
use qevolve::state::StateVector;
use qevolve::vqls::{SolveOptions, WarmStartSolver};
use qevolve::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeStatus {
    Ok = 0,
    Argument = 1,
    Degenerate = 2,
    SingularCost = 3,
    SingularMatrix = 4,
    Unstable = 5,
    Diverged = 6,
    State = 7,
    Config = 8,
    Io = 9,
    NullPointer = 10,
    Panic = 11,
}

/// Boundary type of a Laplacian.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeBoundary {
    Dirichlet = 0,
    Neumann = 1,
}

/// Which twin of an experiment to run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeMode {
    Quantum = 0,
    OracleOnly = 1,
    Verify = 2,
}

/// Opaque operator handle.
pub struct QeOperator(DecomposedOperator);

/// Opaque warm-starting solver handle.
pub struct QeSolver(WarmStartSolver);

/// Opaque experiment report handle.
pub struct QeReport {
    report: Report,
    summary: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QeStatus {
    match e {
        Error::Argument(_) => QeStatus::Argument,
        Error::Degenerate(_) => QeStatus::Degenerate,
        Error::SingularCost(_) => QeStatus::SingularCost,
        Error::SingularMatrix => QeStatus::SingularMatrix,
        Error::Unstable(_) => QeStatus::Unstable,
        Error::Diverged(_) => QeStatus::Diverged,
        Error::State(_) => QeStatus::State,
        Error::Config(_) => QeStatus::Config,
        Error::Io(_) => QeStatus::Io,
    }
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QeStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QeStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer passed for `{what}`"));
            QeStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            QeStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(
    p: *mut f64,
    len: usize,
    what: &'static str,
) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Core(Error::Argument(format!("`{what}` is not valid UTF-8"))))
}

fn check_len(expected: usize, len: usize) -> Result<(), Failure> {
    if expected != len {
        return Err(Failure::Core(Error::Argument(format!(
            "expected {expected} entries, got {len}"
        ))));
    }
    Ok(())
}

/// Message of the last failed call on this thread (empty after success).
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn qe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds `I * identity + delta * L` for the 1D Laplacian `L` on `2^n` nodes.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qe_operator_heat_1d(
    n: usize,
    boundary: QeBoundary,
    delta: f64,
    identity: f64,
    out: *mut *mut QeOperator,
) -> QeStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let b = match boundary {
            QeBoundary::Dirichlet => Boundary::Dirichlet,
            QeBoundary::Neumann => Boundary::Neumann,
        };
        let op = decompose_laplacian_1d(n, b)?
            .scaled(delta)
            .plus_identity(identity);
        *out = Box::into_raw(Box::new(QeOperator(op)));
        Ok(())
    })
}

/// Releases an operator; null is ignored.
///
/// # Safety
/// `op` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qe_operator_free(op: *mut QeOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Vector length the operator acts on (`2^n`), or 0 for null.
///
/// # Safety
/// `op` must be null or a live operator handle.
#[no_mangle]
pub unsafe extern "C" fn qe_operator_dim(op: *const QeOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// Number of non-identity terms, or 0 for null.
///
/// # Safety
/// `op` must be null or a live operator handle.
#[no_mangle]
pub unsafe extern "C" fn qe_operator_term_count(op: *const QeOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.term_count())
}

/// `out = A x`.
///
/// # Safety
/// `x` and `out` must each point to `len` doubles; `op` must be live.
#[no_mangle]
pub unsafe extern "C" fn qe_operator_apply(
    op: *const QeOperator,
    x: *const f64,
    out: *mut f64,
    len: usize,
) -> QeStatus {
    guard(|| {
        let op = op.as_ref().ok_or(Failure::Null("op"))?;
        check_len(op.0.dim(), len)?;
        let y = op.0.apply(slice(x, len, "x")?)?;
        slice_mut(out, len, "out")?.copy_from_slice(&y);
        Ok(())
    })
}

/// `<psi|A|psi>` for a real, normalized `psi` evaluated term by term.
///
/// # Safety
/// `psi` must point to `len` doubles, `value` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn qe_operator_expect(
    op: *const QeOperator,
    psi: *const f64,
    len: usize,
    value: *mut f64,
) -> QeStatus {
    guard(|| {
        let op = op.as_ref().ok_or(Failure::Null("op"))?;
        check_len(op.0.dim(), len)?;
        if value.is_null() {
            return Err(Failure::Null("value"));
        }
        let state = StateVector::from_real(slice(psi, len, "psi")?)?;
        *value = expect_operator(&state, &op.0)?;
        Ok(())
    })
}

/// Creates a solver with `layers` ansatz layers, convergence tolerance
/// `tol` (0 selects the default) and a seed for random initializations.
/// The solver warm-starts each solve from the previous optimum.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qe_solver_new(
    layers: usize,
    tol: f64,
    seed: u64,
    out: *mut *mut QeSolver,
) -> QeStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if layers == 0 || tol < 0.0 || !tol.is_finite() {
            return Err(Failure::Core(Error::Argument(
                "need layers >= 1 and a finite tol >= 0".into(),
            )));
        }
        let mut options = SolveOptions::default();
        if tol > 0.0 {
            options.tol = tol;
        }
        *out = Box::into_raw(Box::new(QeSolver(WarmStartSolver::new(
            layers, options, seed,
        ))));
        Ok(())
    })
}

/// Releases a solver; null is ignored.
///
/// # Safety
/// `solver` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qe_solver_free(solver: *mut QeSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Solves `A x = b` variationally. `iterations` (optional) receives the
/// optimizer iteration count.
///
/// # Safety
/// `b` and `x` must each point to `len` doubles; `iterations` may be null.
#[no_mangle]
pub unsafe extern "C" fn qe_solver_solve(
    solver: *mut QeSolver,
    op: *const QeOperator,
    b: *const f64,
    x: *mut f64,
    len: usize,
    iterations: *mut usize,
) -> QeStatus {
    guard(|| {
        let solver = solver.as_mut().ok_or(Failure::Null("solver"))?;
        let op = op.as_ref().ok_or(Failure::Null("op"))?;
        check_len(op.0.dim(), len)?;
        let solve = solver.0.solve(&op.0, slice(b, len, "b")?)?;
        slice_mut(x, len, "x")?.copy_from_slice(&solve.x);
        if let Some(it) = iterations.as_mut() {
            *it = solve.result.map_or(0, |r| r.n_iterations);
        }
        Ok(())
    })
}

/// Runs an experiment described by TOML text.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_run_config(
    config: *const c_char,
    mode: QeMode,
    out: *mut *mut QeReport,
) -> QeStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let cfg = ExperimentConfig::parse(str_arg(config, "config")?)?;
        let mode = match mode {
            QeMode::Quantum => Mode::Quantum,
            QeMode::OracleOnly => Mode::OracleOnly,
            QeMode::Verify => Mode::Verify,
        };
        let report = run_config(&cfg, mode)?;
        let summary = CString::new(report.summary_line()).unwrap_or_default();
        *out = Box::into_raw(Box::new(QeReport { report, summary }));
        Ok(())
    })
}

/// Releases a report; null is ignored.
///
/// # Safety
/// `report` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qe_report_free(report: *mut QeReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// One-line summary owned by the report.
///
/// # Safety
/// `report` must be null or live; null yields null.
#[no_mangle]
pub unsafe extern "C" fn qe_report_summary(report: *const QeReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.summary.as_ptr())
}

/// Time-averaged trace error; NaN when the run was not verified.
///
/// # Safety
/// `report` must be null or live; null yields NaN.
#[no_mangle]
pub unsafe extern "C" fn qe_report_mean_trace_error(report: *const QeReport) -> f64 {
    report
        .as_ref()
        .and_then(|r| r.report.mean_trace_error())
        .unwrap_or(f64::NAN)
}

/// Writes the report's CSV files and summary into `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated path; `report` must be live.
#[no_mangle]
pub unsafe extern "C" fn qe_report_write(report: *const QeReport, dir: *const c_char) -> QeStatus {
    guard(|| {
        let report = report.as_ref().ok_or(Failure::Null("report"))?;
        report.report.write(Path::new(str_arg(dir, "dir")?))?;
        Ok(())
    })
}
