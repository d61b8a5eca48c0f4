//! C ABI for the chi2qec verification library.
//!
//! Every fallible function returns a [`Chi2Status`]. On failure the message
//! is available from [`chi2qec_last_error`] on the same thread. Strings
//! handed out by the library are NUL-terminated and must be released with
//! [`chi2qec_string_free`]; code handles with [`chi2qec_code_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chi2qec::cli::commands::{self, ErrorSpec};
use chi2qec::cli::{criteria, RunConfig};
use chi2qec::codes::{self, CodeKind, CodeSpec};
use chi2qec::{bounds, syndromes, Error};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chi2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    UnknownName = 4,
    /// The computation ran but a verdict failed (KL, recovery, bound).
    VerificationFailed = 5,
    /// A library error other than a usage error.
    ComputationFailed = 6,
    Panic = 7,
}

/// Code parameters `(N, n, q, b, k)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct Chi2CodeParams {
    pub size: u32,
    pub n: u32,
    pub q: u32,
    pub b: u32,
    pub k: u32,
}

/// Summary of a Knill-Laflamme check.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct Chi2KlSummary {
    pub passed: bool,
    pub error_count: u32,
    pub max_offdiag_residual: f64,
    pub max_distortion_residual: f64,
}

/// Opaque code handle.
pub struct Chi2Code {
    spec: CodeSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> Chi2Status {
    match e {
        Error::UnknownName(_) => Chi2Status::UnknownName,
        Error::InvalidParameter(_) | Error::Parse(_) | Error::InvalidLayout(_) => Chi2Status::InvalidArgument,
        Error::KlViolation { .. } | Error::UnknownSyndrome(_) => Chi2Status::VerificationFailed,
        _ => Chi2Status::ComputationFailed,
    }
}

struct Fail(Chi2Status, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Fail>;

/// Runs `f`, converting errors and panics into a status and last-error message.
fn guard<F>(f: F) -> Chi2Status
where
    F: FnOnce() -> FfiResult<Chi2Status>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_last_error(msg);
            s
        }
        Err(_) => {
            set_last_error("panic inside chi2qec");
            Chi2Status::Panic
        }
    }
}

fn null() -> Fail {
    Fail(Chi2Status::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(p: *const c_char) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(Chi2Status::InvalidUtf8, "argument is not valid UTF-8".into()))
}

unsafe fn out<'a, T>(p: *mut T) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(null)
}

unsafe fn code_ref<'a>(p: *const Chi2Code) -> FfiResult<&'a Chi2Code> {
    p.as_ref().ok_or_else(null)
}

fn into_c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail(Chi2Status::ComputationFailed, "string contains NUL".into()))
}

fn verdict(passed: bool) -> Chi2Status {
    if passed {
        Chi2Status::Ok
    } else {
        Chi2Status::VerificationFailed
    }
}

/// Library version, a static string that must not be freed.
#[no_mangle]
pub extern "C" fn chi2qec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next chi2qec call on the same thread.
#[no_mangle]
pub extern "C" fn chi2qec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a code by name (`pcc`, `eecc`, `bc`, `bc2mode`) and size `N`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out_code` writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_code_new(name: *const c_char, size: u32, out_code: *mut *mut Chi2Code) -> Chi2Status {
    guard(|| {
        let slot = out(out_code)?;
        *slot = ptr::null_mut();
        let kind: CodeKind = read_str(name)?.parse()?;
        let spec = codes::build(kind, size)?;
        *slot = Box::into_raw(Box::new(Chi2Code { spec }));
        Ok(Chi2Status::Ok)
    })
}

/// Releases a code handle. NULL is ignored.
///
/// # Safety
/// `code` must come from [`chi2qec_code_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_code_free(code: *mut Chi2Code) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// # Safety
/// `code` must be a live handle and `params` writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_code_params(code: *const Chi2Code, params: *mut Chi2CodeParams) -> Chi2Status {
    guard(|| {
        let p = code_ref(code)?.spec.params;
        *out(params)? = Chi2CodeParams { size: p.size, n: p.n, q: p.q, b: p.b, k: p.k };
        Ok(Chi2Status::Ok)
    })
}

/// Logical dimension and code rate `k log2 b / (n log2 q)`.
///
/// # Safety
/// `code` must be a live handle; `dim` and `rate` writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_code_summary(code: *const Chi2Code, dim: *mut u32, rate: *mut f64) -> Chi2Status {
    guard(|| {
        let c = &code_ref(code)?.spec;
        *out(dim)? = c.logical_dim() as u32;
        *out(rate)? = c.code_rate();
        Ok(Chi2Status::Ok)
    })
}

/// Codewords and metadata as JSON.
///
/// # Safety
/// `code` must be a live handle and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_code_to_json(code: *const Chi2Code, json: *mut *mut c_char) -> Chi2Status {
    guard(|| {
        let slot = out(json)?;
        *slot = ptr::null_mut();
        *slot = into_c_string(code_ref(code)?.spec.to_json().to_string())?;
        Ok(Chi2Status::Ok)
    })
}

/// Knill-Laflamme check. `errors` is `lowest-order`, `xi<m>`,
/// `xi<m>:loss|gain|dephasing` or `ad[<m>]`. Returns
/// `VerificationFailed` when the condition does not hold; `summary` is
/// filled either way. `json` may be NULL.
///
/// # Safety
/// `code` must be a live handle, `errors` NUL-terminated, `summary`
/// writable, and `json` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_kl_check(
    code: *const Chi2Code,
    errors: *const c_char,
    gamma: f64,
    tolerance: f64,
    summary: *mut Chi2KlSummary,
    json: *mut *mut c_char,
) -> Chi2Status {
    guard(|| {
        let c = &code_ref(code)?.spec;
        let spec: ErrorSpec = read_str(errors)?.parse()?;
        let summary = out(summary)?;
        let config = RunConfig { tolerance, ..RunConfig::default() };
        config.validate()?;
        let o = commands::kl_check(c.kind, c.params.size, &spec, gamma, None, &config)?;
        let sets = o.results["sets"].as_array().cloned().unwrap_or_default();
        let field = |name: &str| {
            sets.iter().map(|s| s["report"][name].as_f64().unwrap_or(f64::NAN)).fold(0.0, f64::max)
        };
        *summary = Chi2KlSummary {
            passed: o.passed,
            error_count: sets.iter().map(|s| s["report"]["labels"].as_array().map_or(0, Vec::len)).sum::<usize>() as u32,
            max_offdiag_residual: field("max_offdiag_residual"),
            max_distortion_residual: field("max_distortion_residual"),
        };
        if let Some(slot) = json.as_mut() {
            *slot = into_c_string(o.results.to_string())?;
        }
        Ok(verdict(o.passed))
    })
}

/// Syndrome table of the code as CSV (`error_label,p,q`).
///
/// # Safety
/// `code` must be a live handle and `csv` writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_syndrome_table_csv(code: *const Chi2Code, csv: *mut *mut c_char) -> Chi2Status {
    guard(|| {
        let slot = out(csv)?;
        *slot = ptr::null_mut();
        let table = syndromes::syndrome_table(&code_ref(code)?.spec)?;
        *slot = into_c_string(syndromes::table_to_csv(&table))?;
        Ok(Chi2Status::Ok)
    })
}

/// Recovery of `trials` seeded random logical states after `error`.
/// Writes the smallest fidelity; returns `VerificationFailed` when it is
/// below `1 - tolerance`.
///
/// # Safety
/// `code` must be a live handle, `error` NUL-terminated, `min_fidelity`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_recovery_trials(
    code: *const Chi2Code,
    error: *const c_char,
    trials: u32,
    seed: u64,
    tolerance: f64,
    min_fidelity: *mut f64,
) -> Chi2Status {
    guard(|| {
        let c = &code_ref(code)?.spec;
        let label = read_str(error)?;
        let slot = out(min_fidelity)?;
        let s = syndromes::recovery_trials(c, label, trials as usize, seed, tolerance)?;
        *slot = s.min_fidelity;
        Ok(verdict(s.passed))
    })
}

/// Smallest `n` satisfying the rotation bound for `(q, b, k, t)`, searched
/// up to `max_n`.
///
/// # Safety
/// `n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_rotation_min_n(q: u32, b: u32, k: u32, t: u32, max_n: u32, n: *mut u32) -> Chi2Status {
    guard(|| {
        let slot = out(n)?;
        *slot = bounds::min_n(q, b, k, t, max_n)?;
        Ok(Chi2Status::Ok)
    })
}

/// Whether the loss bound `(1 + 3n) b^k <= (4q - 3)^n` holds.
///
/// # Safety
/// `holds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_loss_bound_holds(n: u32, q: u32, b: u32, k: u32, holds: *mut bool) -> Chi2Status {
    guard(|| {
        let slot = out(holds)?;
        *slot = bounds::loss_bound_holds(n, q, b, k)?;
        Ok(Chi2Status::Ok)
    })
}

/// Evaluates one acceptance criterion (1..=9), or all of them when
/// `criterion` is 0, and writes the JSON list of results. Returns
/// `VerificationFailed` when any evaluated criterion fails.
///
/// # Safety
/// `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chi2qec_report(criterion: u32, seed: u64, json: *mut *mut c_char) -> Chi2Status {
    guard(|| {
        let slot = out(json)?;
        *slot = ptr::null_mut();
        let config = RunConfig { seed, ..RunConfig::default() };
        let list = match criterion {
            0 => criteria::evaluate_all(&config),
            1..=9 => vec![criteria::evaluate(criterion, &config)],
            _ => return Err(Fail(Chi2Status::InvalidArgument, format!("criterion must be 0..=9, got {criterion}"))),
        };
        let passed = list.iter().all(|c| c.passed);
        let value = serde_json::Value::Array(list.iter().map(|c| c.to_json()).collect());
        *slot = into_c_string(value.to_string())?;
        Ok(verdict(passed))
    })
}
