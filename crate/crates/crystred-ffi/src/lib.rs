//! C ABI over the crystred engine.
//!
//! Every function returns a [`CrystredStatus`]. On anything other than
//! `CRYSTRED_STATUS_OK` a message is available from [`crystred_last_error`]
//! on the same thread. Handles are opaque and owned by the caller, who
//! releases them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use crystred::lemma_verify::{verify_section_prop, verify_telescoping, BlockId, Instance, LemmaVerifyError, PropId};
use crystred::padic::{parse_scalar, ExtScalar, Prime};
use crystred::report::{Status, VerificationReport};
use crystred::zigzag::{check_llc_consistency, classify, Scope, Slope, Valuation};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrystredStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed input: bad prime, unparsable scalar, unknown identifier.
    InvalidArgument = 3,
    /// The instance does not meet a precondition or hypothesis.
    Precondition = 4,
    /// The precision is too low to decide a comparison.
    Precision = 5,
    /// Other engine error.
    Engine = 6,
    /// A panic was caught at the boundary.
    Panic = 7,
}

/// A p-adic scalar in Q_p(sqrt p).
pub struct CrystredScalar(ExtScalar);

/// A weight with its slope-3/2 eigenvalue and derived invariants.
pub struct CrystredInstance(Instance);

/// A finished check: verdict plus the JSON rendering.
pub struct CrystredReport {
    verdict: CrystredVerdict,
    json: CString,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrystredVerdict {
    Pass = 0,
    Fail = 1,
    NotAsserted = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(CrystredStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn lemma_failure(e: LemmaVerifyError) -> Failure {
    let status = match e {
        LemmaVerifyError::Precondition(_) | LemmaVerifyError::Hypothesis(_) => CrystredStatus::Precondition,
        LemmaVerifyError::Precision(_) => CrystredStatus::Precision,
        LemmaVerifyError::UnknownId(_) => CrystredStatus::InvalidArgument,
        _ => CrystredStatus::Engine,
    };
    Failure(status, e.to_string())
}

fn invalid(msg: impl ToString) -> Failure {
    Failure(CrystredStatus::InvalidArgument, msg.to_string())
}

/// Run `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> FfiResult<()>) -> CrystredStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CrystredStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside crystred");
            CrystredStatus::Panic
        }
    }
}

/// # Safety
/// `text` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char) -> FfiResult<&'a str> {
    if text.is_null() {
        return Err(Failure(CrystredStatus::NullPointer, "null string argument".into()));
    }
    unsafe { CStr::from_ptr(text) }
        .to_str()
        .map_err(|e| Failure(CrystredStatus::InvalidUtf8, e.to_string()))
}

/// # Safety
/// `h` must be null or a handle produced by this library and not yet freed.
unsafe fn deref<'a, T>(h: *const T) -> FfiResult<&'a T> {
    unsafe { h.as_ref() }.ok_or_else(|| Failure(CrystredStatus::NullPointer, "null handle".into()))
}

fn store<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure(CrystredStatus::NullPointer, "null output pointer".into()));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn prime(p: u64) -> FfiResult<Prime> {
    Prime::new(p).map_err(invalid)
}

fn report_handle(report: &VerificationReport) -> FfiResult<CrystredReport> {
    let verdict = match report.status {
        Status::Pass => CrystredVerdict::Pass,
        Status::Fail => CrystredVerdict::Fail,
        Status::NotAsserted => CrystredVerdict::NotAsserted,
    };
    let text = serde_json::to_string(report).map_err(|e| Failure(CrystredStatus::Engine, e.to_string()))?;
    let json = CString::new(text).map_err(|e| Failure(CrystredStatus::Engine, e.to_string()))?;
    Ok(CrystredReport { verdict, json })
}

/// Message for the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[unsafe(no_mangle)]
pub extern "C" fn crystred_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a scalar such as `pi^3*(1 + 2*pi)` for the prime `p`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a writable pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_scalar_parse(
    p: u64,
    text: *const c_char,
    out: *mut *mut CrystredScalar,
) -> CrystredStatus {
    guard(|| {
        let text = unsafe { read_str(text)? };
        let x = parse_scalar(prime(p)?, text).map_err(invalid)?;
        store(out, CrystredScalar(x))
    })
}

/// Valuation in units of 1/2: writes 2 v(x). Fails on zero.
///
/// # Safety
/// `x` must be a live scalar handle and `half_units` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_scalar_valuation(x: *const CrystredScalar, half_units: *mut i64) -> CrystredStatus {
    guard(|| {
        let x = unsafe { deref(x)? };
        let v =
            x.0.valuation()
                .map_err(|e| Failure(CrystredStatus::Precision, e.to_string()))?;
        if half_units.is_null() {
            return Err(Failure(CrystredStatus::NullPointer, "null output pointer".into()));
        }
        unsafe { *half_units = v.0 };
        Ok(())
    })
}

/// Render a scalar in the parser's syntax. Free the result with
/// [`crystred_string_free`].
///
/// # Safety
/// `x` must be a live scalar handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_scalar_to_string(x: *const CrystredScalar, out: *mut *mut c_char) -> CrystredStatus {
    guard(|| {
        let x = unsafe { deref(x)? };
        if out.is_null() {
            return Err(Failure(CrystredStatus::NullPointer, "null output pointer".into()));
        }
        let s = CString::new(x.0.to_string()).map_err(|e| Failure(CrystredStatus::Engine, e.to_string()))?;
        unsafe { *out = s.into_raw() };
        Ok(())
    })
}

/// # Safety
/// `x` must be null or a scalar handle not yet freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_scalar_free(x: *mut CrystredScalar) {
    if !x.is_null() {
        drop(unsafe { Box::from_raw(x) });
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Build an instance at relative precision `prec` pi-digits.
///
/// # Safety
/// `a_p` must be a live scalar handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_instance_new(
    p: u64,
    r: u64,
    a_p: *const CrystredScalar,
    prec: u32,
    out: *mut *mut CrystredInstance,
) -> CrystredStatus {
    guard(|| {
        let a_p = unsafe { deref(a_p)? };
        let inst = Instance::new(p, r, &a_p.0, prec).map_err(lemma_failure)?;
        store(out, CrystredInstance(inst))
    })
}

/// Writes t and, for an exactly known tau, 2 tau. `tau_exact` is set to 0
/// when tau is only bounded below at this precision.
///
/// # Safety
/// `inst` must be a live instance handle and all outputs writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_instance_invariants(
    inst: *const CrystredInstance,
    t: *mut u32,
    tau_half_units: *mut i64,
    tau_exact: *mut bool,
) -> CrystredStatus {
    guard(|| {
        let inst = unsafe { deref(inst)? };
        if t.is_null() || tau_half_units.is_null() || tau_exact.is_null() {
            return Err(Failure(CrystredStatus::NullPointer, "null output pointer".into()));
        }
        let (value, exact) = match inst.0.tau() {
            Valuation::Exact(v) => (v.0, true),
            Valuation::AtLeast(v) => (v.0, false),
        };
        unsafe {
            *t = inst.0.t();
            *tau_half_units = value;
            *tau_exact = exact;
        }
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or an instance handle not yet freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_instance_free(inst: *mut CrystredInstance) {
    if !inst.is_null() {
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Check the telescoping identity for a block such as `chi` or `psi(2)`.
///
/// # Safety
/// `inst` must be a live instance handle, `id` a valid string, `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_verify_lemma(
    inst: *const CrystredInstance,
    id: *const c_char,
    out: *mut *mut CrystredReport,
) -> CrystredStatus {
    guard(|| {
        let inst = unsafe { deref(inst)? };
        let block: BlockId = unsafe { read_str(id)? }.parse().map_err(lemma_failure)?;
        let report = verify_telescoping(block, &inst.0).map_err(lemma_failure)?;
        store(out, report_handle(&report)?)
    })
}

/// Check the image of an F_i, `id` one of F1, F2_le_t, F2_gt, F3_le_t,
/// F3_lt_t1, F3_ge_t1.
///
/// # Safety
/// `inst` must be a live instance handle, `id` a valid string, `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_verify_prop(
    inst: *const CrystredInstance,
    id: *const c_char,
    out: *mut *mut CrystredReport,
) -> CrystredStatus {
    guard(|| {
        let inst = unsafe { deref(inst)? };
        let prop: PropId = unsafe { read_str(id)? }.parse().map_err(lemma_failure)?;
        let report = verify_section_prop(prop, &inst.0).map_err(lemma_failure)?;
        store(out, report_handle(&report)?)
    })
}

/// Classify the reduction for slope "1/2", "1" or "3/2". The report's
/// verdict is the local Langlands consistency check where one applies.
///
/// # Safety
/// `a_p` must be a live scalar handle, `slope` a valid string, `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_classify(
    p: u64,
    r: u64,
    a_p: *const CrystredScalar,
    slope: *const c_char,
    out: *mut *mut CrystredReport,
) -> CrystredStatus {
    guard(|| {
        let a_p = unsafe { deref(a_p)? };
        let text = unsafe { read_str(slope)? };
        let slope = Slope::parse(text).ok_or_else(|| invalid(format!("unknown slope {text:?}")))?;
        let engine = |e: crystred::zigzag::ZigzagError| Failure(CrystredStatus::Engine, e.to_string());
        let cl = classify(p, r, &a_p.0, slope).map_err(engine)?;
        let consistency = if slope == Slope::ThreeHalves && cl.scope == Scope::Verified {
            Some(check_llc_consistency(&cl).map_err(engine)?.0)
        } else {
            None
        };
        let verdict = match &consistency {
            Some(rep) if !rep.passed() => CrystredVerdict::Fail,
            _ => CrystredVerdict::Pass,
        };
        let value = serde_json::json!({
            "branch": cl.branch,
            "branch_index": cl.branch_index,
            "descriptor": cl.descriptor,
            "invariants": cl.invariants,
            "consistency": consistency,
        });
        let json = CString::new(value.to_string()).map_err(|e| Failure(CrystredStatus::Engine, e.to_string()))?;
        store(out, CrystredReport { verdict, json })
    })
}

/// # Safety
/// `report` must be a live report handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_report_verdict(report: *const CrystredReport) -> CrystredVerdict {
    match unsafe { report.as_ref() } {
        Some(r) => r.verdict,
        None => CrystredVerdict::Fail,
    }
}

/// JSON text of the report, owned by the handle.
///
/// # Safety
/// `report` must be a live report handle; the pointer dies with it.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_report_json(report: *const CrystredReport) -> *const c_char {
    match unsafe { report.as_ref() } {
        Some(r) => r.json.as_ptr(),
        None => ptr::null(),
    }
}

/// # Safety
/// `report` must be null or a report handle not yet freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn crystred_report_free(report: *mut CrystredReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}
