//! C interface to the synqc compiler and simulator.
//!
//! Every function returns a [`SynqcStatus`]. On failure the message is kept
//! per thread and read with [`synqc_last_error`]. Objects cross the boundary
//! as opaque handles owned by the caller and released with the matching
//! `_free` function. Strings handed out are released with
//! [`synqc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use synqc::compiler::{export, Circuit, ExportFormat};
use synqc::lexicon::Lexicon;
use synqc::pipeline::{self, CompileOptions, Form, Rewrite};
use synqc::simulator;
use synqc::{Error, ParameterStore};

pub struct SynqcLexicon(Lexicon);

pub struct SynqcCircuit(Circuit);

pub struct SynqcParams(ParameterStore);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynqcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    UnknownWord = 4,
    Ungrammatical = 5,
    Json = 6,
    Compile = 7,
    UnresolvedParameter = 8,
    Simulation = 9,
    BufferTooSmall = 10,
    Io = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynqcForm {
    Bigraph = 0,
    GrammarMeaning = 1,
    Choi = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynqcRewrite {
    Snake = 0,
    None = 1,
}

impl From<SynqcForm> for Form {
    fn from(f: SynqcForm) -> Self {
        match f {
            SynqcForm::Bigraph => Form::Bigraph,
            SynqcForm::GrammarMeaning => Form::GrammarMeaning,
            SynqcForm::Choi => Form::Choi,
        }
    }
}

impl From<SynqcRewrite> for Rewrite {
    fn from(r: SynqcRewrite) -> Self {
        match r {
            SynqcRewrite::Snake => Rewrite::Snake,
            SynqcRewrite::None => Rewrite::None,
        }
    }
}

struct Failure(SynqcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Ungrammatical(_) => SynqcStatus::Ungrammatical,
            Error::UnknownWord(_) => SynqcStatus::UnknownWord,
            Error::Json(_) => SynqcStatus::Json,
            Error::Io(_) => SynqcStatus::Io,
            Error::UnresolvedAngle(_) => SynqcStatus::UnresolvedParameter,
            Error::OpenQubits(_) | Error::TooManyQubits(_) | Error::ZeroVector(_) | Error::OpenWireMismatch(..) => {
                SynqcStatus::Simulation
            }
            Error::UnknownBasicType(_)
            | Error::MalformedType(_)
            | Error::InvalidGrammar(_)
            | Error::EmptySentence
            | Error::Lexicon(_) => SynqcStatus::InvalidInput,
            _ => SynqcStatus::Compile,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(SynqcStatus::Json, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SynqcStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(Failure(SynqcStatus::Panic, msg))
    });
    match outcome {
        Ok(()) => {
            set_last_error(None);
            SynqcStatus::Ok
        }
        Err(Failure(status, msg)) => {
            set_last_error(Some(msg));
            status
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(SynqcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(SynqcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SynqcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(SynqcStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn put<T>(out: *mut *mut T, value: T, what: &str) -> Result<(), Failure> {
    let slot = borrow_mut(out, what)?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let slot = borrow_mut(out, "out")?;
    let s = CString::new(s).map_err(|e| Failure(SynqcStatus::InvalidInput, e.to_string()))?;
    *slot = s.into_raw();
    Ok(())
}

fn utf8(bytes: Vec<u8>) -> Result<String, Failure> {
    String::from_utf8(bytes).map_err(|e| Failure(SynqcStatus::InvalidUtf8, e.to_string()))
}

/// Message of the last failed call on this thread, or null after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn synqc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn synqc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_lexicon_default(out: *mut *mut SynqcLexicon) -> SynqcStatus {
    guard(|| put(out, SynqcLexicon(Lexicon::builtin()), "out"))
}

/// # Safety
/// `json` is a NUL-terminated string and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_lexicon_from_json(json: *const c_char, out: *mut *mut SynqcLexicon) -> SynqcStatus {
    guard(|| {
        let lex = Lexicon::from_json(text(json, "json")?)?;
        put(out, SynqcLexicon(lex), "out")
    })
}

/// # Safety
/// `lex` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn synqc_lexicon_free(lex: *mut SynqcLexicon) {
    if !lex.is_null() {
        drop(Box::from_raw(lex));
    }
}

/// Parses `sentence`. `grammatical` receives whether it reduces to the
/// sentence type; `report` (may be null) receives the parse as JSON.
///
/// # Safety
/// Handles are live, `sentence` is NUL-terminated, outputs are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_parse(
    lex: *const SynqcLexicon,
    sentence: *const c_char,
    grammatical: *mut bool,
    report: *mut *mut c_char,
) -> SynqcStatus {
    guard(|| {
        let lex = borrow(lex, "lexicon")?;
        let r = pipeline::parse_report(&lex.0, text(sentence, "sentence")?)?;
        *borrow_mut(grammatical, "grammatical")? = r.grammatical;
        if !report.is_null() {
            put_string(report, synqc::json::to_string(&r)?)?;
        }
        Ok(())
    })
}

/// Compiles `sentence` with the lexicon's qubit configuration.
///
/// # Safety
/// Handles are live, `sentence` is NUL-terminated, `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_compile(
    lex: *const SynqcLexicon,
    sentence: *const c_char,
    form: SynqcForm,
    rewrite: SynqcRewrite,
    out: *mut *mut SynqcCircuit,
) -> SynqcStatus {
    guard(|| {
        let lex = borrow(lex, "lexicon")?;
        let opts = CompileOptions::new(&lex.0, form.into(), rewrite.into());
        let c = pipeline::compile(&lex.0, text(sentence, "sentence")?, &opts)?;
        put(out, SynqcCircuit(c), "out")
    })
}

/// # Safety
/// `json` is NUL-terminated and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_circuit_from_json(json: *const c_char, out: *mut *mut SynqcCircuit) -> SynqcStatus {
    guard(|| {
        let mut c: Circuit = serde_json::from_str(text(json, "json")?)?;
        c.refresh_params();
        c.validate()?;
        put(out, SynqcCircuit(c), "out")
    })
}

/// # Safety
/// `c` is live and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_circuit_to_json(c: *const SynqcCircuit, out: *mut *mut c_char) -> SynqcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        put_string(out, utf8(export(&c.0, ExportFormat::Json, None)?)?)
    })
}

/// OpenQASM 2 text with angles bound from `params`, which may be null when
/// every angle is a literal.
///
/// # Safety
/// Handles are null or live and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_circuit_to_qasm(
    c: *const SynqcCircuit,
    params: *const SynqcParams,
    out: *mut *mut c_char,
) -> SynqcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        let store = params.as_ref().map(|p| &p.0);
        put_string(out, utf8(export(&c.0, ExportFormat::Qasm, store)?)?)
    })
}

/// # Safety
/// `c` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn synqc_circuit_free(c: *mut SynqcCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of qubits, or 0 for a null handle.
///
/// # Safety
/// `c` is null or live.
#[no_mangle]
pub unsafe extern "C" fn synqc_circuit_n_qubits(c: *const SynqcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.n_qubits)
}

/// Number of open qubits, or 0 for a null handle.
///
/// # Safety
/// `c` is null or live.
#[no_mangle]
pub unsafe extern "C" fn synqc_circuit_n_open(c: *const SynqcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.open_qubits.len())
}

/// Number of distinct parameter names, or 0 for a null handle.
///
/// # Safety
/// `c` is null or live.
#[no_mangle]
pub unsafe extern "C" fn synqc_circuit_n_params(c: *const SynqcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.params.len())
}

/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_params_new(out: *mut *mut SynqcParams) -> SynqcStatus {
    guard(|| put(out, SynqcParams(ParameterStore::new()), "out"))
}

/// Uniform angles for every parameter of `c`, drawn from `seed`.
///
/// # Safety
/// `c` is live and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_params_random(
    c: *const SynqcCircuit,
    seed: u64,
    out: *mut *mut SynqcParams,
) -> SynqcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        put(out, SynqcParams(ParameterStore::random(&c.0.params, seed)), "out")
    })
}

/// Draws angles for the parameters of `c` that `p` lacks.
///
/// # Safety
/// Handles are live.
#[no_mangle]
pub unsafe extern "C" fn synqc_params_fill_missing(p: *mut SynqcParams, c: *const SynqcCircuit, seed: u64) -> SynqcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        borrow_mut(p, "params")?.0.fill_missing(&c.0.params, seed);
        Ok(())
    })
}

/// # Safety
/// `json` is NUL-terminated and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_params_from_json(json: *const c_char, out: *mut *mut SynqcParams) -> SynqcStatus {
    guard(|| {
        let store: ParameterStore = serde_json::from_str(text(json, "json")?)?;
        put(out, SynqcParams(store), "out")
    })
}

/// # Safety
/// `p` is live and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_params_to_json(p: *const SynqcParams, out: *mut *mut c_char) -> SynqcStatus {
    guard(|| {
        let p = borrow(p, "params")?;
        put_string(out, synqc::json::to_string(&p.0)?)
    })
}

/// # Safety
/// `p` is live and `name` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn synqc_params_set(p: *mut SynqcParams, name: *const c_char, value: f64) -> SynqcStatus {
    guard(|| {
        let name = text(name, "name")?;
        borrow_mut(p, "params")?.0.set(name, value);
        Ok(())
    })
}

/// # Safety
/// `p` is live, `name` is NUL-terminated and `value` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_params_get(p: *const SynqcParams, name: *const c_char, value: *mut f64) -> SynqcStatus {
    guard(|| {
        let v = borrow(p, "params")?.0.get(text(name, "name")?)?;
        *borrow_mut(value, "value")? = v;
        Ok(())
    })
}

/// # Safety
/// `p` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn synqc_params_free(p: *mut SynqcParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Simulates `c` and writes the `2^open` amplitudes, scalar applied, into
/// `re` and `im`. `len` always receives the amplitude count; when `capacity`
/// is smaller nothing is written and `BufferTooSmall` is returned, so a call
/// with null buffers and zero capacity queries the size.
///
/// # Safety
/// Handles are live, `re` and `im` hold `capacity` doubles, `len` is valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_simulate(
    c: *const SynqcCircuit,
    p: *const SynqcParams,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> SynqcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        let p = borrow(p, "params")?;
        let len = borrow_mut(len, "len")?;
        let state = simulator::simulate(&c.0, &p.0)?;
        let n = state.amplitudes.len();
        *len = n;
        if capacity < n {
            return Err(Failure(SynqcStatus::BufferTooSmall, format!("{n} amplitudes, capacity {capacity}")));
        }
        if re.is_null() || im.is_null() {
            return Err(Failure(SynqcStatus::NullPointer, "amplitude buffer is null".into()));
        }
        let re = std::slice::from_raw_parts_mut(re, n);
        let im = std::slice::from_raw_parts_mut(im, n);
        for (k, a) in state.amplitudes.iter().enumerate() {
            re[k] = a.re;
            im[k] = a.im;
        }
        Ok(())
    })
}

/// Fidelity of the meanings of `a` and `b` under the same parameters.
///
/// # Safety
/// Handles are live and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn synqc_fidelity(
    a: *const SynqcCircuit,
    b: *const SynqcCircuit,
    p: *const SynqcParams,
    out: *mut f64,
) -> SynqcStatus {
    guard(|| {
        let (a, b, p) = (borrow(a, "a")?, borrow(b, "b")?, borrow(p, "params")?);
        let f = simulator::fidelity(&simulator::simulate(&a.0, &p.0)?, &simulator::simulate(&b.0, &p.0)?)?;
        *borrow_mut(out, "out")? = f;
        Ok(())
    })
}
