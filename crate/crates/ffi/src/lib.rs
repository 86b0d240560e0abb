//! C ABI over `crcodes`. Objects are opaque heap handles released with their
//! `*_free` function; every fallible call returns a [`CrcStatus`] and leaves a
//! message for [`crc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use crcodes::classify::{self, ClassifyOptions, Params};
use crcodes::constructions::{construct_code_d, hamming_retraction};
use crcodes::hamming::min_distance;
use crcodes::io::{read_code, write_code};
use crcodes::partitions::{verify_cr, CrVerdict};
use crcodes::{CodeSet, Error, QuotientMatrix};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Infeasible = 4,
    Budget = 5,
    BufferTooSmall = 6,
    Internal = 7,
    InvalidArgument = 8,
}

/// A set of words in H(n,q).
pub struct CrcCode(CodeSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> CrcStatus {
    match e {
        Error::Infeasible(_) => CrcStatus::Infeasible,
        Error::Budget(_) => CrcStatus::Budget,
        Error::Parse { .. } | Error::Json(_) | Error::Space { .. } | Error::Symbol { .. } | Error::Rank { .. } | Error::Duplicate(_) => {
            CrcStatus::Parse
        }
        Error::Field(_) | Error::TooFewWords(_) | Error::EmptyCode | Error::NoFullWeight | Error::SpaceMismatch(..) => {
            CrcStatus::InvalidArgument
        }
        _ => CrcStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CrcStatus>) -> CrcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CrcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside crcodes");
            CrcStatus::Internal
        }
    }
}

fn lib<T>(r: crcodes::Result<T>) -> Result<T, CrcStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, CrcStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(CrcStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|e| {
        set_error(e.to_string());
        CrcStatus::InvalidUtf8
    })
}

unsafe fn code_arg<'a>(p: *const CrcCode) -> Result<&'a CodeSet, CrcStatus> {
    p.as_ref().map(|c| &c.0).ok_or_else(|| {
        set_error("null code handle");
        CrcStatus::NullPointer
    })
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, CrcStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer");
        CrcStatus::NullPointer
    })
}

fn into_c_string(s: String) -> Result<*mut c_char, CrcStatus> {
    CString::new(s).map(CString::into_raw).map_err(|e| {
        set_error(e.to_string());
        CrcStatus::Internal
    })
}

/// Message of the last failed call on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn crc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn crc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a code file ("n q" header, one word per line).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crc_code_parse(text: *const c_char, out: *mut *mut CrcCode) -> CrcStatus {
    guard(|| {
        let out = out_arg(out)?;
        let code = lib(read_code(str_arg(text)?))?;
        *out = Box::into_raw(Box::new(CrcCode(code)));
        Ok(())
    })
}

/// The 416-word code D in H(13,2).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crc_code_d(out: *mut *mut CrcCode) -> CrcStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = Box::into_raw(Box::new(CrcCode(lib(construct_code_d())?)));
        Ok(())
    })
}

/// Full-weight words of the Hamming code with redundancy `m` over GF(`q`).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crc_code_hamming_retraction(m: usize, q: usize, out: *mut *mut CrcCode) -> CrcStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = Box::into_raw(Box::new(CrcCode(lib(hamming_retraction(m, q))?)));
        Ok(())
    })
}

/// Releases a code; null is ignored.
///
/// # Safety
/// `code` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn crc_code_free(code: *mut CrcCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Space and size of a code.
///
/// # Safety
/// `code` must be a live handle; the outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn crc_code_shape(code: *const CrcCode, n: *mut usize, q: *mut usize, len: *mut usize) -> CrcStatus {
    guard(|| {
        let c = code_arg(code)?;
        *out_arg(n)? = c.space().n();
        *out_arg(q)? = c.space().q();
        *out_arg(len)? = c.len();
        Ok(())
    })
}

/// Minimum distance between distinct codewords.
///
/// # Safety
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crc_code_min_distance(code: *const CrcCode, out: *mut usize) -> CrcStatus {
    guard(|| {
        let c = code_arg(code)?;
        *out_arg(out)? = lib(min_distance(c))?;
        Ok(())
    })
}

/// Whether the code is completely regular. When it is, its covering radius
/// goes to `radius` and, if `capacity` ≥ radius, the array to `b` and `c`.
/// A too-small capacity still fills `radius` and returns `BufferTooSmall`.
///
/// # Safety
/// `code` must be a live handle; `b` and `c` must hold `capacity` values
/// (or be null when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn crc_verify_cr(
    code: *const CrcCode,
    is_cr: *mut bool,
    radius: *mut usize,
    b: *mut u32,
    c: *mut u32,
    capacity: usize,
) -> CrcStatus {
    guard(|| {
        let code = code_arg(code)?;
        let verdict = lib(verify_cr(code))?;
        let is_cr = out_arg(is_cr)?;
        let radius = out_arg(radius)?;
        *is_cr = verdict.is_cr();
        *radius = verdict.cell_sizes().len() - 1;
        let Some(array) = verdict.array() else {
            return Ok(());
        };
        if capacity < array.b.len() {
            set_error(format!("array needs {} entries", array.b.len()));
            return Err(CrcStatus::BufferTooSmall);
        }
        if b.is_null() || c.is_null() {
            set_error("null array buffer");
            return Err(CrcStatus::NullPointer);
        }
        ptr::copy_nonoverlapping(array.b.as_ptr(), b, array.b.len());
        ptr::copy_nonoverlapping(array.c.as_ptr(), c, array.c.len());
        Ok(())
    })
}

/// The CR verdict as JSON; release with [`crc_string_free`].
///
/// # Safety
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crc_verify_cr_json(code: *const CrcCode, out: *mut *mut c_char) -> CrcStatus {
    guard(|| {
        let code = code_arg(code)?;
        let verdict: CrVerdict = lib(verify_cr(code))?;
        let json = lib(serde_json::to_string(&verdict).map_err(Error::from))?;
        *out_arg(out)? = into_c_string(json)?;
        Ok(())
    })
}

/// The code in the code-file format; release with [`crc_string_free`].
///
/// # Safety
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crc_code_write(code: *const CrcCode, out: *mut *mut c_char) -> CrcStatus {
    guard(|| {
        let code = code_arg(code)?;
        *out_arg(out)? = into_c_string(write_code(code))?;
        Ok(())
    })
}

/// Classifies binary equitable partitions with the given quotient matrix
/// ("a,b;c,d" rows), length `n` and anchor cell `d`. `schedule` may be null
/// or "r0,r2;r0,r2;...". The JSON report goes to `out`.
///
/// # Safety
/// String arguments must be NUL-terminated (or null where allowed) and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn crc_classify_json(
    quotient: *const c_char,
    n: usize,
    d: usize,
    schedule: *const c_char,
    threads: usize,
    out: *mut *mut c_char,
) -> CrcStatus {
    guard(|| {
        let out = out_arg(out)?;
        let quotient: QuotientMatrix = lib(str_arg(quotient)?.parse())?;
        let params = lib(Params::new(quotient, n, d))?;
        let schedule = if schedule.is_null() { Vec::new() } else { parse_schedule(str_arg(schedule)?)? };
        let opts = ClassifyOptions { threads, ..ClassifyOptions::default() };
        let outcome = lib(classify::classify(&params, &schedule, &opts))?;
        let json = lib(serde_json::to_string(&outcome.report).map_err(Error::from))?;
        *out = into_c_string(json)?;
        Ok(())
    })
}

fn parse_schedule(s: &str) -> Result<Vec<(usize, usize)>, CrcStatus> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p.split_once(',')?;
            Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| {
            set_error(format!("bad schedule {s:?}"));
            CrcStatus::Parse
        })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn crc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
