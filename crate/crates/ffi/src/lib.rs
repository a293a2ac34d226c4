//! C interface to the nslab laboratory.
//!
//! Objects cross the boundary as opaque handles created and freed by this
//! library. Every fallible call returns an [`NslabStatus`]; the message of
//! the last failure on the calling thread is available from
//! [`nslab_last_error_message`]. Panics are caught and reported as
//! [`NslabStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nslab::experiments::{self, ExperimentConfig, Outcome, Report};
use nslab::NslabError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NslabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    Io = 5,
    /// Quadrature, resolution, containment or aliasing guard.
    Numerical = 6,
    /// Blow-up, Picard divergence or sweep limit.
    Solver = 7,
    UnknownExperiment = 8,
    Panic = 9,
}

/// Opaque experiment configuration.
pub struct NslabConfig(ExperimentConfig);

/// Opaque result of one experiment run.
pub struct NslabReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(s).expect("nul bytes removed")));
}

fn status_of(e: &NslabError) -> NslabStatus {
    use NslabError::*;
    match e {
        InvalidGrid(_)
        | InvalidParameter(_)
        | DimensionMismatch { .. }
        | GridMismatch
        | TimeGridMismatch
        | EmptyTimeGrid
        | TooFewPoints(_)
        | SampleTooClose(_) => NslabStatus::InvalidArgument,
        Config(_) | Parse(_) => NslabStatus::Config,
        Io(_) => NslabStatus::Io,
        MaxSweeps { .. } | Divergence(_) | Blowup { .. } => NslabStatus::Solver,
        _ => NslabStatus::Numerical,
    }
}

/// Runs `f`, recording errors and panics.
fn guarded(f: impl FnOnce() -> Result<(), (NslabStatus, String)>) -> NslabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NslabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            NslabStatus::Panic
        }
    }
}

fn lib_err(e: NslabError) -> (NslabStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (NslabStatus, String) {
    (NslabStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (NslabStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (NslabStatus::InvalidUtf8, e.to_string()))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nslab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn nslab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration. Free with [`nslab_config_free`].
#[no_mangle]
pub extern "C" fn nslab_config_default() -> *mut NslabConfig {
    Box::into_raw(Box::new(NslabConfig(ExperimentConfig::default())))
}

/// Parses a TOML configuration; missing keys take their defaults.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nslab_config_from_toml(text: *const c_char, out: *mut *mut NslabConfig) -> NslabStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null());
        }
        let cfg = ExperimentConfig::from_toml(read_str(text)?).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(NslabConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nslab_config_free(cfg: *mut NslabConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn nslab_config_set_seed(cfg: *mut NslabConfig, seed: u64) -> NslabStatus {
    guarded(|| {
        let c = cfg.as_mut().ok_or_else(null)?;
        c.0.seed = seed;
        Ok(())
    })
}

/// Writes the 16-hex-digit configuration hash plus a nul into `buf`, which
/// must hold at least 17 bytes.
///
/// # Safety
/// `cfg` must be live and `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nslab_config_hash(cfg: *const NslabConfig, buf: *mut c_char, len: usize) -> NslabStatus {
    guarded(|| {
        let c = cfg.as_ref().ok_or_else(null)?;
        if buf.is_null() {
            return Err(null());
        }
        let h = c.0.hash();
        if len < h.len() + 1 {
            return Err((
                NslabStatus::InvalidArgument,
                format!("buffer of {len} bytes, need {}", h.len() + 1),
            ));
        }
        ptr::copy_nonoverlapping(h.as_ptr().cast::<c_char>(), buf, h.len());
        *buf.add(h.len()) = 0;
        Ok(())
    })
}

fn runner(name: &str) -> Option<fn(&ExperimentConfig) -> nslab::Result<Outcome>> {
    Some(match name {
        "stability" => experiments::exp_stability,
        "mollified" => experiments::exp_mollified,
        "hyper" => experiments::exp_hyperviscous,
        "kernels" => experiments::exp_kernels,
        "landau" => experiments::exp_landau,
        "norms-selftest" => experiments::exp_norms_selftest,
        "selfsim" => experiments::exp_selfsim,
        "spectral-selftest" => experiments::exp_spectral_selftest,
        "solver-selftest" => experiments::exp_solver_selftest,
        _ => return None,
    })
}

/// Runs an experiment by its subcommand name. When `out_dir` is not null
/// the CSV and JSON files are written there. Free the report with
/// [`nslab_report_free`].
///
/// # Safety
/// `cfg` must be live, `name` (and `out_dir` if given) nul-terminated, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nslab_run(
    cfg: *const NslabConfig,
    name: *const c_char,
    out_dir: *const c_char,
    out: *mut *mut NslabReport,
) -> NslabStatus {
    guarded(|| {
        let c = cfg.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let name = read_str(name)?;
        let run =
            runner(name).ok_or_else(|| (NslabStatus::UnknownExperiment, format!("no experiment named {name}")))?;
        let outcome = run(&c.0).map_err(lib_err)?;
        if !out_dir.is_null() {
            outcome.write(Path::new(read_str(out_dir)?)).map_err(lib_err)?;
        }
        *out = Box::into_raw(Box::new(NslabReport(outcome.report)));
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nslab_report_free(report: *mut NslabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// 1 if every gating check passed, 0 if not, -1 for a null handle.
///
/// # Safety
/// `report` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn nslab_report_passed(report: *const NslabReport) -> i32 {
    report.as_ref().map_or(-1, |r| i32::from(r.0.passed()))
}

/// Status of acceptance criterion `id`: 1 pass, 0 fail, -1 if the report
/// carries no check for it or the handle is null.
///
/// # Safety
/// `report` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn nslab_report_criterion(report: *const NslabReport, id: u8) -> i32 {
    match report.as_ref().and_then(|r| r.0.criterion(id)) {
        Some(true) => 1,
        Some(false) => 0,
        None => -1,
    }
}

/// Number of checks in the report, 0 for a null handle.
///
/// # Safety
/// `report` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn nslab_report_num_checks(report: *const NslabReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.checks.len())
}

/// Measured value and pass flag of check `index`.
///
/// # Safety
/// `report` must be live; `measured` and `passed` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nslab_report_check(
    report: *const NslabReport,
    index: usize,
    measured: *mut f64,
    passed: *mut i32,
) -> NslabStatus {
    guarded(|| {
        let r = report.as_ref().ok_or_else(null)?;
        if measured.is_null() || passed.is_null() {
            return Err(null());
        }
        let c = r.0.checks.get(index).ok_or_else(|| {
            (
                NslabStatus::InvalidArgument,
                format!("check {index} out of {}", r.0.checks.len()),
            )
        })?;
        *measured = c.measured;
        *passed = i32::from(c.passed);
        Ok(())
    })
}

/// Report as JSON. Free the string with [`nslab_string_free`].
///
/// # Safety
/// `report` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nslab_report_json(report: *const NslabReport, out: *mut *mut c_char) -> NslabStatus {
    guarded(|| {
        let r = report.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let json = serde_json::to_string(&r.0).map_err(|e| (NslabStatus::Io, e.to_string()))?;
        *out = CString::new(json)
            .map_err(|e| (NslabStatus::Io, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nslab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Steady residual summary of the Landau solution `c` on `samples` random
/// points in the shell `0.5 ≤ |x| ≤ 4`.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nslab_landau_residual(
    c: f64,
    samples: usize,
    h: f64,
    seed: u64,
    max: *mut f64,
    median: *mut f64,
    max_divergence: *mut f64,
) -> NslabStatus {
    guarded(|| {
        if max.is_null() || median.is_null() || max_divergence.is_null() {
            return Err(null());
        }
        let pts = nslab::exact::shell_samples(samples, 0.5, 4.0, seed);
        let r = nslab::exact::landau_residual(c, &pts, h).map_err(lib_err)?;
        *max = r.max;
        *median = r.median;
        *max_divergence = r.max_divergence;
        Ok(())
    })
}

/// `C_ℓ`, the `L¹` mass of the hyperviscous kernel at unit time.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nslab_compute_cl(ell: f64, value: *mut f64, error_estimate: *mut f64) -> NslabStatus {
    guarded(|| {
        if value.is_null() || error_estimate.is_null() {
            return Err(null());
        }
        let c = nslab::kernels::compute_cl(ell).map_err(lib_err)?;
        *value = c.value;
        *error_estimate = c.error_estimate;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let p = nslab_last_error_message();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn config_round_trip_and_hash() {
        let cfg = nslab_config_default();
        let mut buf = [0 as c_char; 17];
        unsafe {
            assert_eq!(nslab_config_hash(cfg, buf.as_mut_ptr(), buf.len()), NslabStatus::Ok);
            let h = CStr::from_ptr(buf.as_ptr()).to_str().unwrap().to_string();
            assert_eq!(h, ExperimentConfig::default().hash());
            assert_eq!(
                nslab_config_hash(cfg, buf.as_mut_ptr(), 4),
                NslabStatus::InvalidArgument
            );
            assert_eq!(nslab_config_set_seed(cfg, 5), NslabStatus::Ok);
            assert_eq!((*cfg).0.seed, 5);
            nslab_config_free(cfg);
        }
    }

    #[test]
    fn parse_errors_are_reported() {
        let mut cfg = ptr::null_mut();
        let bad = CString::new("[grid]\nsize = 1\n").unwrap();
        let st = unsafe { nslab_config_from_toml(bad.as_ptr(), &mut cfg) };
        assert_eq!(st, NslabStatus::Config);
        assert!(cfg.is_null());
        assert!(last_error().contains("size"));
        let st = unsafe { nslab_config_from_toml(ptr::null(), &mut cfg) };
        assert_eq!(st, NslabStatus::NullPointer);
    }

    #[test]
    fn runs_an_experiment() {
        let text = CString::new("[selftest]\nfields = 4\n").unwrap();
        let mut cfg = ptr::null_mut();
        let mut rep = ptr::null_mut();
        let name = CString::new("spectral-selftest").unwrap();
        unsafe {
            assert_eq!(nslab_config_from_toml(text.as_ptr(), &mut cfg), NslabStatus::Ok);
            assert_eq!(nslab_run(cfg, name.as_ptr(), ptr::null(), &mut rep), NslabStatus::Ok);
            assert_eq!(nslab_report_passed(rep), 1);
            assert_eq!(nslab_report_criterion(rep, 1), 1);
            assert_eq!(nslab_report_criterion(rep, 9), -1);
            assert_eq!(nslab_report_num_checks(rep), 4);
            let (mut m, mut p) = (0.0, 0);
            assert_eq!(nslab_report_check(rep, 0, &mut m, &mut p), NslabStatus::Ok);
            assert_eq!(p, 1);
            assert_eq!(
                nslab_report_check(rep, 99, &mut m, &mut p),
                NslabStatus::InvalidArgument
            );
            let mut json = ptr::null_mut();
            assert_eq!(nslab_report_json(rep, &mut json), NslabStatus::Ok);
            assert!(CStr::from_ptr(json).to_str().unwrap().contains("spectral-selftest"));
            nslab_string_free(json);
            let unknown = CString::new("nope").unwrap();
            let mut other = ptr::null_mut();
            assert_eq!(
                nslab_run(cfg, unknown.as_ptr(), ptr::null(), &mut other),
                NslabStatus::UnknownExperiment
            );
            nslab_report_free(rep);
            nslab_config_free(cfg);
        }
    }

    #[test]
    fn landau_and_kernel_constants() {
        let (mut max, mut med, mut div) = (0.0, 0.0, 0.0);
        unsafe {
            assert_eq!(
                nslab_landau_residual(2.0, 5, 1e-3, 1, &mut max, &mut med, &mut div),
                NslabStatus::Ok
            );
            assert!(max < 1e-7 && med <= max && div < 1e-9);
            assert_eq!(
                nslab_landau_residual(0.5, 5, 1e-3, 1, &mut max, &mut med, &mut div),
                NslabStatus::InvalidArgument
            );
            let (mut v, mut e) = (0.0, 0.0);
            assert_eq!(nslab_compute_cl(2.0, &mut v, &mut e), NslabStatus::Ok);
            assert!((v - 1.0).abs() < 1e-4);
            assert_eq!(nslab_compute_cl(-1.0, &mut v, &mut e), NslabStatus::InvalidArgument);
        }
    }

    #[test]
    fn null_handles_are_safe() {
        unsafe {
            assert_eq!(nslab_report_passed(ptr::null()), -1);
            assert_eq!(nslab_report_num_checks(ptr::null()), 0);
            nslab_report_free(ptr::null_mut());
            nslab_config_free(ptr::null_mut());
            assert_eq!(nslab_config_set_seed(ptr::null_mut(), 1), NslabStatus::NullPointer);
        }
        assert!(!nslab_version().is_null());
    }
}
