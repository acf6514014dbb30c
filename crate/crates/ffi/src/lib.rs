//! C ABI over `qsig-core`.
//!
//! Every fallible function returns a [`QsigStatus`]; on failure the message
//! is available from [`qsig_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Strings
//! returned as `char *` are owned by the caller and released with
//! [`qsig_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qsig_core::cli::{run_experiment, ExperimentConfig, RunOutput};
use qsig_core::hanaoka::{setup, HanaokaParams, UserKeys};
use qsig_core::harness::{resolve_dispute, Validity};
use qsig_core::{mqds, p2, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsigStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Parameters or configuration rejected.
    InvalidArgument = 3,
    /// The requested bound carries no information for these parameters.
    VacuousBound = 4,
    IndexOutOfRange = 5,
    /// A protocol or I/O step failed.
    Runtime = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsigVerdict {
    Invalid = 0,
    Valid = 1,
    Tie = 2,
}

/// Users of one polynomial-signature instance.
pub struct QsigHanaoka {
    users: Vec<UserKeys>,
}

/// Reports of one experiment run.
pub struct QsigReport {
    output: RunOutput,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_for(e: &Error) -> QsigStatus {
    match e {
        Error::VacuousBound(_) => QsigStatus::VacuousBound,
        Error::NotPrime(_)
        | Error::ModulusOutOfRange(_)
        | Error::InvalidParameter { .. }
        | Error::ThresholdOrder { .. }
        | Error::Unsupported { .. }
        | Error::SweepTooLarge { .. }
        | Error::TooFewVotes { .. }
        | Error::Config(_) => QsigStatus::InvalidArgument,
        _ => QsigStatus::Runtime,
    }
}

struct Fail(QsigStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_for(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QsigStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QsigStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsigStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
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
            QsigStatus::Panic
        }
    }
}

/// # Safety
/// `out` must be null or valid for a write.
unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail(QsigStatus::InvalidUtf8, format!("{what}: {e}")))
}

/// Message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qsig_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version; static storage.
#[no_mangle]
pub extern "C" fn qsig_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn qsig_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sets up `n` users (identities 1..=n) over `F_q`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_hanaoka_new(
    n: usize,
    omega: usize,
    psi: u32,
    q: u64,
    seed: u64,
    out: *mut *mut QsigHanaoka,
) -> QsigStatus {
    guard(|| {
        let mut rng = qsig_core::rng::seeded(seed);
        let (_, users) = setup(HanaokaParams { n, omega, psi, q }, &mut rng)?;
        write(out, Box::into_raw(Box::new(QsigHanaoka { users })), "out")
    })
}

/// # Safety
/// `h` must be null or a handle from `qsig_hanaoka_new`, freed once.
#[no_mangle]
pub unsafe extern "C" fn qsig_hanaoka_free(h: *mut QsigHanaoka) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// User `signer` signs `message`; user `verifier` checks it. Users are
/// indexed from 0.
///
/// # Safety
/// `h` must be a live handle and `accepted` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_hanaoka_sign_verify(
    h: *const QsigHanaoka,
    signer: usize,
    verifier: usize,
    message: u64,
    accepted: *mut bool,
) -> QsigStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        let n = h.users.len();
        let (s, v) = match (h.users.get(signer), h.users.get(verifier)) {
            (Some(s), Some(v)) => (s, v),
            _ => {
                return Err(Fail(
                    QsigStatus::IndexOutOfRange,
                    format!("user index out of range 0..{n}"),
                ))
            }
        };
        let m = qsig_core::field::FieldElement::new(message, s.modulus())?;
        let sig = s.sign(m)?;
        write(accepted, v.verify(s.identity, &sig)?, "accepted")
    })
}

/// Runs an experiment config given as JSON (the format accepted by the
/// `attack` and `sweep` subcommands).
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_run_experiment_json(
    config_json: *const c_char,
    out: *mut *mut QsigReport,
) -> QsigStatus {
    guard(|| {
        let cfg = ExperimentConfig::from_json(read_str(config_json, "config_json")?)?;
        let output = run_experiment(&cfg)?;
        write(out, Box::into_raw(Box::new(QsigReport { output })), "out")
    })
}

/// # Safety
/// `r` must be null or a handle from `qsig_run_experiment_json`, freed once.
#[no_mangle]
pub unsafe extern "C" fn qsig_report_free(r: *mut QsigReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of trial reports; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_report_count(r: *const QsigReport) -> usize {
    r.as_ref().map_or(0, |r| r.output.reports.len())
}

/// Empirical success frequency and, when one applies, the analytic bound of
/// report `index`. `bound` is set to NaN when `has_bound` is false.
///
/// # Safety
/// `r` must be a live handle; the out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qsig_report_stats(
    r: *const QsigReport,
    index: usize,
    empirical: *mut f64,
    bound: *mut f64,
    has_bound: *mut bool,
) -> QsigStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let t = r.output.reports.get(index).ok_or_else(|| {
            Fail(
                QsigStatus::IndexOutOfRange,
                format!(
                    "report index {index} out of range 0..{}",
                    r.output.reports.len()
                ),
            )
        })?;
        let b = t.bound.filter(|_| !t.bound_vacuous);
        write(empirical, t.empirical, "empirical")?;
        write(bound, b.unwrap_or(f64::NAN), "bound")?;
        write(has_bound, b.is_some(), "has_bound")
    })
}

/// Whether any report exceeds its bound by more than 3σ.
///
/// # Safety
/// `r` must be a live handle and `violated` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_report_violates_bound(
    r: *const QsigReport,
    violated: *mut bool,
) -> QsigStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        write(violated, r.output.violates_bound(), "violated")
    })
}

/// The run as JSON lines (header, then one line per report).
///
/// # Safety
/// `r` must be a live handle and `out` valid for a write. Free the result
/// with `qsig_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qsig_report_to_jsonl(
    r: *const QsigReport,
    out: *mut *mut c_char,
) -> QsigStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let mut buf = Vec::new();
        r.output
            .write(&mut buf, qsig_core::cli::OutputFormat::Json)?;
        let s = CString::new(buf).map_err(|e| Fail(QsigStatus::Runtime, e.to_string()))?;
        write(out, s.into_raw(), "out")
    })
}

/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_p2_repudiation_bound(
    s_v: f64,
    l: usize,
    out: *mut f64,
) -> QsigStatus {
    guard(|| write(out, p2::p2_repudiation_bound(s_v, l)?, "out"))
}

/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_p2_forging_bound(s_v: f64, l: usize, out: *mut f64) -> QsigStatus {
    guard(|| write(out, p2::p2_forging_bound(s_v, l)?, "out"))
}

/// Returns `QSIG_STATUS_VACUOUS_BOUND` when the bound carries no information.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_mqds_forging_bound(
    p_min: f64,
    p_usd: f64,
    delta: f64,
    s_v: f64,
    l: usize,
    out: *mut f64,
) -> QsigStatus {
    guard(|| {
        write(
            out,
            mqds::mqds_forging_bound(p_min, p_usd, delta, s_v, l)?,
            "out",
        )
    })
}

/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_mqds_repudiation_bound(
    p_usd: f64,
    s_a: f64,
    s_v: f64,
    l: usize,
    out: *mut f64,
) -> QsigStatus {
    guard(|| {
        write(
            out,
            mqds::mqds_repudiation_bound(p_usd, s_a, s_v, l)?,
            "out",
        )
    })
}

/// Majority vote over `n >= 3` votes (`true` = message valid).
///
/// # Safety
/// `votes` must point to `n` readable bools and `verdict` be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qsig_resolve_dispute(
    votes: *const bool,
    n: usize,
    verdict: *mut QsigVerdict,
) -> QsigStatus {
    guard(|| {
        if votes.is_null() {
            return Err(null("votes"));
        }
        let v = resolve_dispute(std::slice::from_raw_parts(votes, n))?;
        let out = match v.verdict {
            Some(Validity::MessageValid) => QsigVerdict::Valid,
            Some(Validity::MessageInvalid) => QsigVerdict::Invalid,
            None => QsigVerdict::Tie,
        };
        write(verdict, out, "verdict")
    })
}
