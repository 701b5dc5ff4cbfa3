//! C interface to the nullforge library: immersions as opaque handles,
//! pipeline runs from JSON configs, status codes with a thread-local message.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nullforge::pipeline::{run_experiment, PipelineConfig, Report};
use nullforge::weierstrass::{conformal_factor, flux_loop, ImmersionDisc};
use nullforge::{presets, Error, C64};

/// Status returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Domain = 4,
    Numerical = 5,
    Geometry = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// A conformal minimal disc or annulus in ℝⁿ.
pub struct NfImmersion(ImmersionDisc);

/// The report of a finished pipeline run.
pub struct NfRun(Report);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> NfStatus {
    match e {
        Error::Config { .. } | Error::Precondition(_) => NfStatus::Config,
        Error::Domain(_) | Error::Dimension(..) | Error::Period(_) => NfStatus::Domain,
        Error::Geometry(_) | Error::Curvature(_) => NfStatus::Geometry,
        Error::Io(_) => NfStatus::Io,
        _ => NfStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), NfStatus>) -> NfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NfStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside nullforge".into());
            NfStatus::Panic
        }
    }
}

fn fail(e: Error) -> NfStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, NfStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(NfStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        NfStatus::InvalidUtf8
    })
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, NfStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        NfStatus::NullPointer
    })
}

/// Copies `s` with a trailing NUL into `buf`; `needed` receives the full size.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), NfStatus> {
    let bytes = s.as_bytes();
    if !needed.is_null() {
        *needed = bytes.len() + 1;
    }
    if buf.is_null() || len < bytes.len() + 1 {
        set_error(format!("buffer of {len} bytes, {} needed", bytes.len() + 1));
        return Err(NfStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
    *buf.add(bytes.len()) = 0;
    Ok(())
}

/// Copies the message of the last failed call on this thread into `buf`.
/// Returns the message length including the NUL; nothing is written when
/// `len` is smaller than that.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nf_last_error(buf: *mut c_char, len: usize) -> usize {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    let bytes = msg.as_bytes();
    if !buf.is_null() && len > bytes.len() {
        ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        *buf.add(bytes.len()) = 0;
    }
    bytes.len() + 1
}

/// Flat disc ζ ↦ scale·(ℜζ, ℑζ, 0, …) in ℝⁿ.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn nf_immersion_plane(n: usize, scale: f64, out: *mut *mut NfImmersion) -> NfStatus {
    guard(|| {
        if out.is_null() {
            return Err(NfStatus::NullPointer);
        }
        if n < 3 || !(scale > 0.0) {
            set_error(format!("need n ≥ 3 and scale > 0, got n = {n}, scale = {scale}"));
            return Err(NfStatus::Config);
        }
        *out = Box::into_raw(Box::new(NfImmersion(presets::plane(n, scale))));
        Ok(())
    })
}

/// The catenoid on 0.2 < |ζ| < 1.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn nf_immersion_catenoid(out: *mut *mut NfImmersion) -> NfStatus {
    guard(|| {
        if out.is_null() {
            return Err(NfStatus::NullPointer);
        }
        *out = Box::into_raw(Box::new(NfImmersion(presets::catenoid())));
        Ok(())
    })
}

/// Parses an immersion from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn nf_immersion_from_json(json: *const c_char, out: *mut *mut NfImmersion) -> NfStatus {
    guard(|| {
        let s = str_arg(json)?;
        if out.is_null() {
            return Err(NfStatus::NullPointer);
        }
        let imm = ImmersionDisc::from_json(s).map_err(fail)?;
        *out = Box::into_raw(Box::new(NfImmersion(imm)));
        Ok(())
    })
}

/// Serializes an immersion to JSON; see [`nf_last_error`] for the buffer rules.
///
/// # Safety
/// `imm` must come from this library; `buf` null or valid for `len` bytes;
/// `needed` null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn nf_immersion_to_json(
    imm: *const NfImmersion,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> NfStatus {
    guard(|| {
        let s = handle(imm)?.0.to_json().map_err(fail)?;
        write_str(&s, buf, len, needed)
    })
}

/// # Safety
/// `imm` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nf_immersion_free(imm: *mut NfImmersion) {
    if !imm.is_null() {
        drop(Box::from_raw(imm));
    }
}

/// Ambient dimension n, or 0 for a null handle.
///
/// # Safety
/// `imm` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn nf_immersion_dim(imm: *const NfImmersion) -> usize {
    imm.as_ref().map(|i| i.0.dim()).unwrap_or(0)
}

/// F(re + i·im) into `out[0..n]`.
///
/// # Safety
/// `imm` must come from this library and `out` be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nf_immersion_eval(imm: *const NfImmersion, re: f64, im: f64, out: *mut f64, len: usize) -> NfStatus {
    guard(|| {
        let i = handle(imm)?;
        if out.is_null() {
            return Err(NfStatus::NullPointer);
        }
        if len < i.0.dim() {
            set_error(format!("need {} doubles", i.0.dim()));
            return Err(NfStatus::BufferTooSmall);
        }
        let v = i.0.eval(C64::new(re, im)).map_err(fail)?;
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        Ok(())
    })
}

/// Conformal factor λ with ‖dF‖ = λ|dζ|.
///
/// # Safety
/// `imm` must come from this library and `out` be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn nf_conformal_factor(imm: *const NfImmersion, re: f64, im: f64, out: *mut f64) -> NfStatus {
    guard(|| {
        let i = handle(imm)?;
        if out.is_null() {
            return Err(NfStatus::NullPointer);
        }
        *out = conformal_factor(&i.0, C64::new(re, im)).map_err(fail)?;
        Ok(())
    })
}

/// Flux over the circle of the given radius into `out[0..n]`.
///
/// # Safety
/// `imm` must come from this library and `out` be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nf_flux(imm: *const NfImmersion, radius: f64, out: *mut f64, len: usize) -> NfStatus {
    guard(|| {
        let i = handle(imm)?;
        if out.is_null() {
            return Err(NfStatus::NullPointer);
        }
        if len < i.0.dim() {
            set_error(format!("need {} doubles", i.0.dim()));
            return Err(NfStatus::BufferTooSmall);
        }
        let f = flux_loop(&i.0, radius, 256).map_err(fail)?.0;
        ptr::copy_nonoverlapping(f.as_ptr(), out, f.len());
        Ok(())
    })
}

/// Runs the experiment described by a JSON pipeline config.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn nf_run(config: *const c_char, out: *mut *mut NfRun) -> NfStatus {
    guard(|| {
        let s = str_arg(config)?;
        if out.is_null() {
            return Err(NfStatus::NullPointer);
        }
        let cfg = PipelineConfig::from_json(s).map_err(fail)?;
        let outcome = run_experiment(&cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(NfRun(outcome.report)));
        Ok(())
    })
}

/// 1 if every checked inequality of the run holds, 0 otherwise or for null.
///
/// # Safety
/// `run` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn nf_run_passed(run: *const NfRun) -> i32 {
    run.as_ref().map(|r| r.0.pass as i32).unwrap_or(0)
}

/// The report JSON of a run.
///
/// # Safety
/// `run` must come from this library; `buf` null or valid for `len` bytes;
/// `needed` null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn nf_run_report_json(run: *const NfRun, buf: *mut c_char, len: usize, needed: *mut usize) -> NfStatus {
    guard(|| {
        let s = handle(run)?.0.to_json().map_err(fail)?;
        write_str(&s, buf, len, needed)
    })
}

/// # Safety
/// `run` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nf_run_free(run: *mut NfRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
