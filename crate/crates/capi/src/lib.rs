//! C interface to the hybrid reasoner. Knowledge bases travel as opaque
//! handles, verdicts come back through out parameters, and induced
//! theories come back as strings in the same surface syntax the parser
//! reads. Status codes match the command line tool's exit codes, so a
//! caller can treat the two entry points interchangeably.
//!
//! Every function that can fail leaves a message for
//! [`hylog_last_error`]; the message lives in thread local storage and
//! stays valid until the same thread calls into the library again.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use hylog::bias::Bias;
use hylog::kb::HybridKb;
use hylog::learn::{minimize_theory, nmdisc, nmlearn, LearnError};
use hylog::parse::{
    parse_bias, parse_examples, parse_ground_conjunction, parse_kb, serialize_theory,
};
use hylog::reason::{entails_ground, nm_satisfiable, Limits};

/// How a call ended. The numeric values match the command line tool's
/// exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HylogStatus {
    /// The call completed; any verdict is in the out parameters.
    Ok = 0,
    /// A pointer was null, text was not valid UTF-8, or the input did
    /// not parse or validate.
    InvalidInput = 2,
    /// A reasoning bound was exhausted; raise the limits and retry.
    ResourceLimit = 3,
    /// The background knowledge base is unsatisfiable, so induction
    /// over it would be vacuous.
    InconsistentInput = 4,
}

/// Reasoning bounds. Obtain a baseline from [`hylog_default_limits`]
/// and adjust fields as needed; passing null wherever a limits pointer
/// is expected uses the defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HylogLimits {
    /// Partitions tested per satisfiability question before giving up.
    pub max_partitions: u64,
    /// Ceiling on distinct ground datalog atoms.
    pub max_herbrand: u64,
    /// Search nodes per stable-model question.
    pub datalog_budget: u64,
}

/// An opaque parsed and validated knowledge base. Create with
/// [`hylog_kb_parse`], release with [`hylog_kb_free`].
pub struct HylogKb {
    inner: HybridKb,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: HylogStatus, msg: String) -> HylogStatus {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes stripped");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
    status
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn invalid(msg: impl Into<String>) -> HylogStatus {
    fail(HylogStatus::InvalidInput, msg.into())
}

fn learn_failure(e: LearnError) -> HylogStatus {
    match e {
        LearnError::UnsatisfiableBackground => {
            fail(HylogStatus::InconsistentInput, format!("inconsistent input: {e}"))
        }
        LearnError::Reason(r) => fail(HylogStatus::ResourceLimit, format!("resource bound: {r}")),
        other => invalid(other.to_string()),
    }
}

/// Read a C string argument; on failure records the error and returns
/// the status to propagate.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, HylogStatus> {
    if ptr.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn read_limits(ptr: *const HylogLimits) -> Limits {
    if ptr.is_null() {
        return Limits::default();
    }
    let c = unsafe { *ptr };
    Limits {
        max_partitions: c.max_partitions,
        max_herbrand: c.max_herbrand as usize,
        datalog_budget: c.datalog_budget,
    }
}

unsafe fn read_kb<'a>(ptr: *const HylogKb) -> Result<&'a HybridKb, HylogStatus> {
    if ptr.is_null() {
        return Err(invalid("knowledge base handle is null"));
    }
    Ok(unsafe { &(*ptr).inner })
}

unsafe fn load_bias(ptr: *const c_char, kb: &HybridKb) -> Result<Bias, HylogStatus> {
    let text = unsafe { read_str(ptr, "bias text") }?;
    let bias = parse_bias(text).map_err(|e| invalid(format!("bias: {e}")))?;
    bias.validate_against(kb).map_err(|e| invalid(format!("bias: {e}")))?;
    Ok(bias)
}

fn give_string(out: *mut *mut c_char, text: String) -> HylogStatus {
    let text = CString::new(text.replace('\0', " ")).expect("nul bytes stripped");
    unsafe { *out = text.into_raw() };
    HylogStatus::Ok
}

/// The default reasoning bounds.
#[no_mangle]
pub extern "C" fn hylog_default_limits() -> HylogLimits {
    let d = Limits::default();
    HylogLimits {
        max_partitions: d.max_partitions,
        max_herbrand: d.max_herbrand as u64,
        datalog_budget: d.datalog_budget,
    }
}

/// The message from the last failed call on this thread, or null if the
/// last call succeeded.
///
/// # Safety
///
/// The returned pointer stays valid only until this thread next calls
/// any function in this library; copy the message out before that.
#[no_mangle]
pub unsafe extern "C" fn hylog_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map_or(std::ptr::null(), |msg| msg.as_ptr())
    })
}

/// Parse and validate a knowledge base from its surface syntax and
/// store a handle in `*out`.
///
/// # Safety
///
/// `text` must point to a NUL-terminated string and `out` to writable
/// storage for one pointer. On success the caller owns the handle and
/// must release it with [`hylog_kb_free`]; on failure `*out` is not
/// written.
#[no_mangle]
pub unsafe extern "C" fn hylog_kb_parse(
    text: *const c_char,
    out: *mut *mut HylogKb,
) -> HylogStatus {
    clear_error();
    if out.is_null() {
        return invalid("out pointer is null");
    }
    let text = match unsafe { read_str(text, "knowledge base text") } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let kb = match parse_kb(text) {
        Ok(kb) => kb,
        Err(e) => return invalid(e.to_string()),
    };
    if let Err(e) = kb.validate() {
        return invalid(e.to_string());
    }
    unsafe { *out = Box::into_raw(Box::new(HylogKb { inner: kb })) };
    HylogStatus::Ok
}

/// Release a knowledge base handle. Passing null is a no-op.
///
/// # Safety
///
/// `kb` must be a handle from [`hylog_kb_parse`] that has not already
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn hylog_kb_free(kb: *mut HylogKb) {
    if !kb.is_null() {
        drop(unsafe { Box::from_raw(kb) });
    }
}

/// Decide whether the knowledge base has a model and write the verdict
/// to `*out_satisfiable`.
///
/// # Safety
///
/// `kb` must be a live handle from [`hylog_kb_parse`], `limits` null or
/// a valid pointer, and `out_satisfiable` writable. On failure
/// `*out_satisfiable` is not written.
#[no_mangle]
pub unsafe extern "C" fn hylog_check_sat(
    kb: *const HylogKb,
    limits: *const HylogLimits,
    out_satisfiable: *mut bool,
) -> HylogStatus {
    clear_error();
    if out_satisfiable.is_null() {
        return invalid("out pointer is null");
    }
    let kb = match unsafe { read_kb(kb) } {
        Ok(kb) => kb,
        Err(status) => return status,
    };
    match nm_satisfiable(kb, &unsafe { read_limits(limits) }) {
        Ok(report) => {
            unsafe { *out_satisfiable = report.satisfiable() };
            HylogStatus::Ok
        }
        Err(e) => fail(HylogStatus::ResourceLimit, format!("resource bound: {e}")),
    }
}

/// Decide whether the knowledge base entails a ground conjunction such
/// as `"boy(paul), MALE(paul)"` and write the verdict to
/// `*out_entailed`.
///
/// # Safety
///
/// `kb` must be a live handle, `query` a NUL-terminated string,
/// `limits` null or valid, and `out_entailed` writable. On failure
/// `*out_entailed` is not written.
#[no_mangle]
pub unsafe extern "C" fn hylog_query(
    kb: *const HylogKb,
    query: *const c_char,
    limits: *const HylogLimits,
    out_entailed: *mut bool,
) -> HylogStatus {
    clear_error();
    if out_entailed.is_null() {
        return invalid("out pointer is null");
    }
    let kb = match unsafe { read_kb(kb) } {
        Ok(kb) => kb,
        Err(status) => return status,
    };
    let text = match unsafe { read_str(query, "query text") } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let atoms = match parse_ground_conjunction(text) {
        Ok(atoms) => atoms,
        Err(e) => return invalid(format!("query: {e}")),
    };
    match entails_ground(kb, &atoms, &unsafe { read_limits(limits) }) {
        Ok(entailed) => {
            unsafe { *out_entailed = entailed };
            HylogStatus::Ok
        }
        Err(e) => fail(HylogStatus::ResourceLimit, format!("resource bound: {e}")),
    }
}

/// Induce a view over the target predicate from labeled examples and
/// write the accepted rules, one per line in surface syntax, to
/// `*out_theory`.
///
/// # Safety
///
/// `kb` must be a live handle; `bias` and `examples` NUL-terminated
/// strings in the language and example file syntaxes; `limits` null or
/// valid; `out_theory` writable. On success the caller owns the string
/// and must release it with [`hylog_string_free`]; on failure
/// `*out_theory` is not written.
#[no_mangle]
pub unsafe extern "C" fn hylog_learn_view(
    kb: *const HylogKb,
    bias: *const c_char,
    examples: *const c_char,
    limits: *const HylogLimits,
    out_theory: *mut *mut c_char,
) -> HylogStatus {
    clear_error();
    if out_theory.is_null() {
        return invalid("out pointer is null");
    }
    let kb = match unsafe { read_kb(kb) } {
        Ok(kb) => kb,
        Err(status) => return status,
    };
    let bias = match unsafe { load_bias(bias, kb) } {
        Ok(b) => b,
        Err(status) => return status,
    };
    let examples = match unsafe { read_str(examples, "examples text") } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let examples = match parse_examples(examples) {
        Ok(e) => e,
        Err(e) => return invalid(format!("examples: {e}")),
    };
    match nmlearn(kb, &bias, &examples, &unsafe { read_limits(limits) }) {
        Ok(out) => give_string(out_theory, serialize_theory(&out.theory.rules)),
        Err(e) => learn_failure(e),
    }
}

/// Discover constraints and rules that hold on the knowledge base and
/// write them, one per line in surface syntax, to `*out_theory`. When
/// `minimize` is true, rules the rest of the theory entails are dropped
/// first; that takes an unsatisfiability proof per candidate, so bound
/// it through `limits` on large theories.
///
/// # Safety
///
/// Same contract as [`hylog_learn_view`], minus the examples.
#[no_mangle]
pub unsafe extern "C" fn hylog_discover(
    kb: *const HylogKb,
    bias: *const c_char,
    limits: *const HylogLimits,
    minimize: bool,
    out_theory: *mut *mut c_char,
) -> HylogStatus {
    clear_error();
    if out_theory.is_null() {
        return invalid("out pointer is null");
    }
    let kb = match unsafe { read_kb(kb) } {
        Ok(kb) => kb,
        Err(status) => return status,
    };
    let bias = match unsafe { load_bias(bias, kb) } {
        Ok(b) => b,
        Err(status) => return status,
    };
    let mut background = kb.clone();
    let facts = std::mem::take(&mut background.facts);
    let limits = unsafe { read_limits(limits) };
    let mut out = match nmdisc(&background, &facts, &bias, &limits) {
        Ok(out) => out,
        Err(e) => return learn_failure(e),
    };
    if minimize {
        out.theory = match minimize_theory(&out.theory, &background, &facts, &limits) {
            Ok(t) => t,
            Err(e) => return fail(HylogStatus::ResourceLimit, format!("resource bound: {e}")),
        };
    }
    give_string(out_theory, serialize_theory(&out.theory.rules))
}

/// Release a string returned by this library. Passing null is a no-op.
///
/// # Safety
///
/// `s` must be a string this library returned that has not already been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn hylog_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
