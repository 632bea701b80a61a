//! C ABI over `tep-core`.
//!
//! Objects are opaque heap handles created by `*_new`/`*_parse`/`*_sample`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`TepStatus`]; on failure a description is available from
//! [`tep_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tep_core::channel::ReceivedWord;
use tep_core::de::{self, DeConfig};
use tep_core::ensemble::{sample_graph, CodeGraph, DegreeDistribution};
use tep_core::graph::{ResolutionLedger, TannerGraph};
use tep_core::harness::ml_oracle_decode;
use tep_core::{bp_run, tep_run, Error, Schedule};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    Contradiction = 5,
    Numerical = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TepDecoder {
    Bp = 0,
    Tep = 1,
    Ml = 2,
}

/// Degree-distribution pair (λ, ρ).
pub struct TepDegreeDistribution(DegreeDistribution);

/// A parity-check code.
pub struct TepCode(CodeGraph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TepStatus {
    match e {
        Error::Parse(_) | Error::InvalidDistribution(_) | Error::Io(_) => TepStatus::Parse,
        Error::Infeasible(_) | Error::RankDeficient { .. } => TepStatus::Infeasible,
        Error::Contradiction { .. } => TepStatus::Contradiction,
        Error::StepSize { .. } | Error::NoStall { .. } | Error::Degenerate(_) | Error::IterationCap(_) => {
            TepStatus::Numerical
        }
        _ => TepStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (TepStatus, String)>) -> TepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TepStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TepStatus::Panic
        }
    }
}

fn core<T>(r: tep_core::Result<T>) -> Result<T, (TepStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TepStatus, String) {
    (TepStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TepStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TepStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (TepStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TepStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn tep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a degree-distribution file body.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_dd_parse(text: *const c_char, out: *mut *mut TepDegreeDistribution) -> TepStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dd = core(DegreeDistribution::parse(str_arg(text, "text")?))?;
        *out = Box::into_raw(Box::new(TepDegreeDistribution(dd)));
        Ok(())
    })
}

/// Builds a distribution from edge-perspective polynomials such as `"x^2"`.
///
/// # Safety
/// `lambda` and `rho` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_dd_from_polynomials(
    lambda: *const c_char,
    rho: *const c_char,
    out: *mut *mut TepDegreeDistribution,
) -> TepStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dd = core(DegreeDistribution::from_polynomials(
            str_arg(lambda, "lambda")?,
            str_arg(rho, "rho")?,
        ))?;
        *out = Box::into_raw(Box::new(TepDegreeDistribution(dd)));
        Ok(())
    })
}

/// # Safety
/// `dd` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tep_dd_free(dd: *mut TepDegreeDistribution) {
    if !dd.is_null() {
        drop(Box::from_raw(dd));
    }
}

/// Design rate `1 − ∫ρ / ∫λ`.
///
/// # Safety
/// `dd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_dd_rate(dd: *const TepDegreeDistribution, out: *mut f64) -> TepStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(dd, "dd")?.0.rate();
        Ok(())
    })
}

/// Asymptotic BP threshold.
///
/// # Safety
/// `dd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_bp_threshold(dd: *const TepDegreeDistribution, out: *mut f64) -> TepStatus {
    guard(|| {
        *out_arg(out, "out")? = de::bp_threshold(&ref_arg(dd, "dd")?.0);
        Ok(())
    })
}

/// Stage A lower bound on the TEP threshold. Non-positive `e_ref` / `dt_rel`
/// select the defaults.
///
/// # Safety
/// `dd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_tep_threshold(
    dd: *const TepDegreeDistribution,
    e_ref: f64,
    dt_rel: f64,
    out: *mut f64,
) -> TepStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let mut cfg = DeConfig::default();
        if e_ref > 0.0 {
            cfg.e_ref = e_ref;
        }
        if dt_rel > 0.0 {
            cfg.dt_rel = dt_rel;
        }
        *out = core(de::tep_threshold_lower_bound(&ref_arg(dd, "dd")?.0, &cfg))?.eps_max_a;
        Ok(())
    })
}

/// Samples a length-`n` code from the ensemble.
///
/// # Safety
/// `dd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_code_sample(
    dd: *const TepDegreeDistribution,
    n: usize,
    seed: u64,
    out: *mut *mut TepCode,
) -> TepStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inst = core(sample_graph(&ref_arg(dd, "dd")?.0, n, seed))?;
        *out = Box::into_raw(Box::new(TepCode(inst.code)));
        Ok(())
    })
}

/// Parses a code in the `n <n> m <m> E <E>` text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_code_parse(text: *const c_char, out: *mut *mut TepCode) -> TepStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let code = core(CodeGraph::parse(str_arg(text, "text")?))?;
        *out = Box::into_raw(Box::new(TepCode(code)));
        Ok(())
    })
}

/// # Safety
/// `code` must come from this library and not be used afterwards. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tep_code_free(code: *mut TepCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Variable count, check count and edge count; any output may be NULL.
///
/// # Safety
/// `code` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_code_dims(
    code: *const TepCode,
    vars: *mut usize,
    checks: *mut usize,
    edges: *mut usize,
) -> TepStatus {
    guard(|| {
        let c = &ref_arg(code, "code")?.0;
        if let Some(v) = vars.as_mut() {
            *v = c.num_vars();
        }
        if let Some(v) = checks.as_mut() {
            *v = c.num_checks();
        }
        if let Some(v) = edges.as_mut() {
            *v = c.edge_count();
        }
        Ok(())
    })
}

/// Decodes one received word. `received[i]` is 0, 1, or −1 for an erasure;
/// `word` receives the decoded bits with −1 where undetermined. `success` is
/// set to 1 when every bit was recovered.
///
/// # Safety
/// `received` and `word` must point to `len` elements; `success` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tep_decode(
    code: *const TepCode,
    decoder: TepDecoder,
    received: *const i8,
    len: usize,
    word: *mut i8,
    success: *mut i32,
) -> TepStatus {
    guard(|| {
        let c = &ref_arg(code, "code")?.0;
        if received.is_null() {
            return Err(null("received"));
        }
        if word.is_null() {
            return Err(null("word"));
        }
        let success = out_arg(success, "success")?;
        if len != c.num_vars() {
            return Err((
                TepStatus::InvalidArgument,
                format!("received has {len} symbols, code has {}", c.num_vars()),
            ));
        }
        let values = std::slice::from_raw_parts(received, len)
            .iter()
            .map(|&s| match s {
                0 => Ok(Some(0)),
                1 => Ok(Some(1)),
                -1 => Ok(None),
                other => Err((TepStatus::InvalidArgument, format!("bad symbol {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rw = ReceivedWord {
            values,
            epsilon: f64::NAN,
            seed: 0,
        };
        let out = match decoder {
            TepDecoder::Ml => core(ml_oracle_decode(c, &rw))?,
            TepDecoder::Bp | TepDecoder::Tep => {
                let mut g = core(TannerGraph::initialize(c, &rw))?;
                let mut ledger = ResolutionLedger::from_received(&rw);
                if decoder == TepDecoder::Bp {
                    core(bp_run(&mut g, &mut ledger))?
                } else {
                    core(tep_run(&mut g, &mut ledger, Schedule::Practical))?
                }
            }
        };
        let dst = std::slice::from_raw_parts_mut(word, len);
        for (d, b) in dst.iter_mut().zip(&out.assignment) {
            *d = b.map_or(-1, |b| b as i8);
        }
        *success = out.is_success() as i32;
        Ok(())
    })
}
