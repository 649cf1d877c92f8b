//! C ABI over `commonnet`.
//!
//! Every call returns a `CnStatus`. On anything but `CN_STATUS_OK` the
//! message is available from `cn_last_error` on the same thread until the
//! next failing call. Results come back through out-pointers. Strings
//! returned by the library are owned by the caller and released with
//! `cn_string_free`; handles are released with their `_free` function.
//! Variable lists are comma-separated names.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use commonnet::common_info::{decompose, gk_entropy};
use commonnet::feasibility::{check_independent, check_multicast, check_separation, check_separation_l};
use commonnet::{Error, FeasibilityReport, JointPmf, Network, Verdict};

/// Opaque joint pmf.
pub struct CnPmf(JointPmf);

/// Opaque network.
pub struct CnNetwork(Network);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidPmf = 4,
    InvalidNetwork = 5,
    UnknownName = 6,
    Precondition = 7,
    Parse = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnScheme {
    Multicast = 0,
    Independent = 1,
    Separation = 2,
    SeparationL = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnVerdict {
    Feasible = 0,
    Infeasible = 1,
    CutConditionsHold = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(CnStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidPmf(_) | Error::NotInSupport { .. } => CnStatus::InvalidPmf,
            Error::InvalidNetwork(_) => CnStatus::InvalidNetwork,
            Error::UnknownVariable(_) | Error::UnknownNode(_) => CnStatus::UnknownName,
            Error::Precondition(_) | Error::Structural(_) => CnStatus::Precondition,
            Error::Json(_) => CnStatus::Parse,
            _ => CnStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CnStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CnStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CnStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CnStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn names<'a>(p: *const c_char, what: &str) -> Result<Vec<&'a str>, Failure> {
    let list: Vec<&str> = text(p, what)?.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if list.is_empty() {
        return Err(Failure(CnStatus::InvalidArgument, format!("`{what}` names no variables")));
    }
    Ok(list)
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

fn owned(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(CnStatus::Internal, "string contains a nul byte".into()))
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a pmf from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cn_pmf_from_json(json: *const c_char, out: *mut *mut CnPmf) -> CnStatus {
    guard(|| {
        let pmf = JointPmf::from_json(text(json, "json")?)?;
        write(out, Box::into_raw(Box::new(CnPmf(pmf))))
    })
}

/// # Safety
/// `pmf` must come from `cn_pmf_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cn_pmf_free(pmf: *mut CnPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// Joint entropy in bits of the listed variables.
///
/// # Safety
/// Pointers must be valid; `vars` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn cn_pmf_entropy(pmf: *const CnPmf, vars: *const c_char, out: *mut f64) -> CnStatus {
    guard(|| {
        let pmf = &handle(pmf, "pmf")?.0;
        write(out, pmf.entropy(&names(vars, "vars")?)?)
    })
}

/// `H(a | b)` in bits.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn cn_pmf_conditional_entropy(
    pmf: *const CnPmf,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> CnStatus {
    guard(|| {
        let pmf = &handle(pmf, "pmf")?.0;
        write(out, pmf.conditional_entropy(&names(a, "a")?, &names(b, "b")?)?)
    })
}

/// `I(a; b)` in bits.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn cn_pmf_mutual_information(
    pmf: *const CnPmf,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> CnStatus {
    guard(|| {
        let pmf = &handle(pmf, "pmf")?.0;
        write(out, pmf.mutual_information(&names(a, "a")?, &names(b, "b")?)?)
    })
}

/// Entropy of the common part of the listed variables.
///
/// # Safety
/// Pointers must be valid; `vars` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn cn_gk_entropy(pmf: *const CnPmf, vars: *const c_char, out: *mut f64) -> CnStatus {
    guard(|| {
        let pmf = &handle(pmf, "pmf")?.0;
        write(out, gk_entropy(&decompose(pmf, &names(vars, "vars")?)?))
    })
}

/// Component partition of the listed variables as JSON. Free the result
/// with `cn_string_free`.
///
/// # Safety
/// Pointers must be valid; `vars` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn cn_decompose_json(
    pmf: *const CnPmf,
    vars: *const c_char,
    out: *mut *mut c_char,
) -> CnStatus {
    guard(|| {
        let pmf = &handle(pmf, "pmf")?.0;
        let partition = decompose(pmf, &names(vars, "vars")?)?;
        let json = serde_json::to_string_pretty(&partition.export()).map_err(Error::from)?;
        write(out, owned(json)?)
    })
}

/// Parses a network from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cn_network_from_json(json: *const c_char, out: *mut *mut CnNetwork) -> CnStatus {
    guard(|| {
        let net = Network::from_json(text(json, "json")?)?;
        write(out, Box::into_raw(Box::new(CnNetwork(net))))
    })
}

/// # Safety
/// `net` must come from `cn_network_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cn_network_free(net: *mut CnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Min-cut value from the listed nodes to `to`.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn cn_network_min_cut(
    net: *const CnNetwork,
    from: *const c_char,
    to: *const c_char,
    out: *mut u64,
) -> CnStatus {
    guard(|| {
        let net = &handle(net, "net")?.0;
        write(out, net.min_cut(&names(from, "from")?, text(to, "to")?)?.value)
    })
}

/// Runs a feasibility check. The verdict goes to `verdict` and, when
/// `report` is not null, the full report as JSON goes to `report`.
///
/// # Safety
/// Handles must be valid; `verdict` writable; `report` null or writable.
#[no_mangle]
pub unsafe extern "C" fn cn_check(
    net: *const CnNetwork,
    pmf: *const CnPmf,
    scheme: CnScheme,
    verdict: *mut CnVerdict,
    report: *mut *mut c_char,
) -> CnStatus {
    guard(|| {
        let net = &handle(net, "net")?.0;
        let pmf = &handle(pmf, "pmf")?.0;
        let r: FeasibilityReport = match scheme {
            CnScheme::Multicast => check_multicast(net, pmf)?,
            CnScheme::Independent => check_independent(net, pmf)?,
            CnScheme::Separation => {
                let vars = pmf.variables();
                if vars.len() < 2 {
                    return Err(Failure(CnStatus::InvalidArgument, "separation needs two variables".into()));
                }
                check_separation(net, pmf, [vars[0].as_str(), vars[1].as_str()])?
            }
            CnScheme::SeparationL => check_separation_l(net, pmf)?,
        };
        let v = match r.verdict {
            Verdict::Feasible => CnVerdict::Feasible,
            Verdict::Infeasible => CnVerdict::Infeasible,
            Verdict::CutConditionsHold => CnVerdict::CutConditionsHold,
        };
        write(verdict, v)?;
        if !report.is_null() {
            report.write(owned(r.to_json()?)?);
        }
        Ok(())
    })
}
