//! C ABI over `orlicz-core`.
//!
//! Every function returns an [`OrliczStatus`]; on failure the message is
//! available from [`orlicz_last_error`] until the next call on the same
//! thread. Handles are opaque and freed with the matching `_free` function.
//! Infinity crosses the boundary as IEEE `+inf`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use orlicz_core::cli::{cmd_check, AnalysisConfig, CheckName};
use orlicz_core::envelope::{Envelope, EnvelopeSpec, GridSpec};
use orlicz_core::phi_core::{Phi, PhiFunction};
use orlicz_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrliczStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParameter = 3,
    DimensionMismatch = 4,
    Config = 5,
    Precondition = 6,
    OutOfScope = 7,
    Numerical = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// An x-independent Φ-function.
pub struct OrliczPhi {
    inner: PhiFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OrliczStatus {
    match e {
        Error::DimensionMismatch { .. } => OrliczStatus::DimensionMismatch,
        Error::InvalidParameter(_) | Error::EmptyIntersection | Error::DegenerateBall | Error::SampleOutsideDomain(_) => {
            OrliczStatus::InvalidParameter
        }
        Error::Config(_) => OrliczStatus::Config,
        Error::Precondition(_) => OrliczStatus::Precondition,
        Error::OutOfScope(_) => OrliczStatus::OutOfScope,
        Error::BracketExhausted(_)
        | Error::AllInfinite
        | Error::InteriorCheck(_)
        | Error::WindowTooSmall(_)
        | Error::EnumerationCap(_) => OrliczStatus::Numerical,
    }
}

fn fail(status: OrliczStatus, msg: impl Into<String>) -> OrliczStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), (OrliczStatus, String)>) -> OrliczStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OrliczStatus::Ok,
        Ok(Err((s, msg))) => fail(s, msg),
        Err(_) => fail(OrliczStatus::Panic, "internal panic"),
    }
}

fn core(e: Error) -> (OrliczStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (OrliczStatus, String) {
    (OrliczStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (OrliczStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (OrliczStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (OrliczStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn publish(h: *mut *mut OrliczPhi, phi: PhiFunction) {
    unsafe { *h = Box::into_raw(Box::new(OrliczPhi { inner: phi })) };
}

/// Parses a Φ-function definition (`family = "power-norm"`, ...) from TOML.
///
/// # Safety
/// `toml` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn orlicz_phi_from_toml(toml: *const c_char, out: *mut *mut OrliczPhi) -> OrliczStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(toml, "toml")?;
        let phi: PhiFunction = toml::from_str(text).map_err(|e| (OrliczStatus::Config, e.to_string()))?;
        publish(out, phi);
        Ok(())
    })
}

/// `|ξ|^p` in dimension `dim`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn orlicz_phi_new_power_norm(dim: usize, p: f64, out: *mut *mut OrliczPhi) -> OrliczStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        publish(out, PhiFunction::power_norm(dim, p).map_err(core)?);
        Ok(())
    })
}

/// # Safety
/// `phi` must come from this library; `xi` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn orlicz_phi_eval(
    phi: *const OrliczPhi,
    xi: *const f64,
    len: usize,
    out: *mut f64,
) -> OrliczStatus {
    guard(|| {
        let phi = phi.as_ref().ok_or_else(|| null("phi"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let xi = slice_arg(xi, len, "xi")?;
        if len != phi.inner.dim() {
            return Err(core(Error::DimensionMismatch {
                expected: phi.inner.dim(),
                got: len,
            }));
        }
        *out = phi.inner.value(xi).get();
        Ok(())
    })
}

/// Returns the dimension of `phi`, or 0 for a null handle.
///
/// # Safety
/// `phi` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn orlicz_phi_dim(phi: *const OrliczPhi) -> usize {
    phi.as_ref().map_or(0, |p| p.inner.dim())
}

/// # Safety
/// `phi` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orlicz_phi_free(phi: *mut OrliczPhi) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// Greatest convex minorant of `phi` on the grid `[lo, hi]` with `per_axis`
/// nodes per axis, built on the support window dilated by `support_scale`.
/// Writes `per_axis^dim` envelope values in row-major order (last axis
/// fastest) and the refinement slack estimate.
///
/// # Safety
/// `lo`/`hi` must hold `dim(phi)` doubles, `values` must hold `capacity`
/// doubles, and `slack` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_envelope_grid(
    phi: *const OrliczPhi,
    lo: *const f64,
    hi: *const f64,
    per_axis: usize,
    support_scale: usize,
    values: *mut f64,
    capacity: usize,
    slack: *mut f64,
) -> OrliczStatus {
    guard(|| {
        let phi = phi.as_ref().ok_or_else(|| null("phi"))?;
        let m = phi.inner.dim();
        let grid = GridSpec {
            lo: slice_arg(lo, m, "lo")?.to_vec(),
            hi: slice_arg(hi, m, "hi")?.to_vec(),
            per_axis,
        };
        let spec = EnvelopeSpec {
            support_scale,
            ..EnvelopeSpec::new(grid)
        };
        let env = Envelope::build(&phi.inner, &spec).map_err(core)?;
        if values.is_null() {
            return Err(null("values"));
        }
        if capacity < env.values.len() {
            return Err((
                OrliczStatus::BufferTooSmall,
                format!("need {} values, capacity is {capacity}", env.values.len()),
            ));
        }
        let out = std::slice::from_raw_parts_mut(values, env.values.len());
        for (o, v) in out.iter_mut().zip(&env.values) {
            *o = v.get();
        }
        if !slack.is_null() {
            *slack = env.slack;
        }
        Ok(())
    })
}

/// Runs `orlicz check <condition>` on an analysis config given as TOML.
/// `exit_code` receives 0 (pass) or 1 (fail or vacuous); `report` receives
/// the full report, to be released with [`orlicz_string_free`].
///
/// # Safety
/// String arguments must be nul-terminated; out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_run_check(
    config_toml: *const c_char,
    condition: *const c_char,
    exit_code: *mut i32,
    report: *mut *mut c_char,
) -> OrliczStatus {
    guard(|| {
        if exit_code.is_null() || report.is_null() {
            return Err(null("out"));
        }
        let cfg = AnalysisConfig::parse(str_arg(config_toml, "config_toml")?).map_err(core)?;
        let name: CheckName = str_arg(condition, "condition")?.parse().map_err(core)?;
        let outcome = cmd_check(&cfg, name).map_err(core)?;
        *exit_code = outcome.code;
        *report = CString::new(outcome.report).expect("report has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn orlicz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn orlicz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
