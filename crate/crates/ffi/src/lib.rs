//! C ABI over the sevenarc core: field arithmetic, 7-arc and Fano counts,
//! and the closed-form values they are compared against.
//!
//! Every fallible call returns an `SaStatus`. On failure a message is kept
//! per thread and can be read with `sa_last_error_message`. Objects are
//! opaque handles released by their `_free` function. Strings returned to
//! the caller are released with `sa_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use sevenarc::arcs::ArcCountJob;
use sevenarc::fano::FanoCensusJob;
use sevenarc::field::{make_field, FieldCtx};
use sevenarc::formulas::{pgl3_order, table1_value};
use sevenarc::jobs::run_to_end;
use sevenarc::orbits::CycleType;
use sevenarc::report::CountReport;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// An element index outside the field.
    NotInField = 3,
    /// Zero has no inverse.
    NotInvertible = 4,
    /// The value does not fit the output type.
    Overflow = 5,
    /// A panic was caught at the boundary.
    Internal = 6,
}

/// A finite field GF(p^(s·l)) with elements numbered 0..size.
pub struct SaField {
    ctx: Arc<FieldCtx>,
}

/// A finished count with its formula comparison.
pub struct SaReport {
    report: CountReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: SaStatus, msg: impl Into<String>) -> SaStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into `Internal`.
fn guard(f: impl FnOnce() -> SaStatus) -> SaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SaStatus::Internal, msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, SaStatus> {
    if s.is_null() {
        return Err(fail(SaStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(SaStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn read_lambda(s: *const c_char) -> Result<CycleType, SaStatus> {
    let s = read_str(s)?;
    s.parse().map_err(|e| fail(SaStatus::InvalidArgument, format!("{e}")))
}

unsafe fn write<T>(out: *mut T, v: T) -> SaStatus {
    if out.is_null() {
        return fail(SaStatus::NullPointer, "null output pointer");
    }
    *out = v;
    SaStatus::Ok
}

fn new_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul removed").into_raw()
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn sa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds GF(p^(s·l)) with p prime.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_field_new(p: u32, s: u32, l: u32, out: *mut *mut SaField) -> SaStatus {
    guard(|| {
        if out.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        match make_field(p, s, l) {
            Ok(ctx) => write(out, Box::into_raw(Box::new(SaField { ctx }))),
            Err(e) => fail(SaStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `f` must come from `sa_field_new` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sa_field_free(f: *mut SaField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

unsafe fn field<'a>(f: *const SaField) -> Result<&'a FieldCtx, SaStatus> {
    f.as_ref().map(|f| &*f.ctx).ok_or_else(|| fail(SaStatus::NullPointer, "null field"))
}

fn check(ctx: &FieldCtx, xs: &[u32]) -> Result<(), SaStatus> {
    match xs.iter().find(|&&x| x >= ctx.size()) {
        Some(x) => Err(fail(SaStatus::NotInField, format!("{x} is not below the field size {}", ctx.size()))),
        None => Ok(()),
    }
}

/// Number of elements.
///
/// # Safety
/// `f` must be a live field handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_field_size(f: *const SaField, out: *mut u32) -> SaStatus {
    guard(|| match field(f) {
        Ok(ctx) => write(out, ctx.size()),
        Err(s) => s,
    })
}

unsafe fn binary(f: *const SaField, a: u32, b: u32, out: *mut u32, op: impl Fn(&FieldCtx, u32, u32) -> u32) -> SaStatus {
    guard(|| {
        let ctx = match field(f) {
            Ok(c) => c,
            Err(s) => return s,
        };
        if let Err(s) = check(ctx, &[a, b]) {
            return s;
        }
        write(out, op(ctx, a, b))
    })
}

/// # Safety
/// `f` must be a live field handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_field_add(f: *const SaField, a: u32, b: u32, out: *mut u32) -> SaStatus {
    binary(f, a, b, out, |c, a, b| c.add(a, b))
}

/// # Safety
/// `f` must be a live field handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_field_sub(f: *const SaField, a: u32, b: u32, out: *mut u32) -> SaStatus {
    binary(f, a, b, out, |c, a, b| c.sub(a, b))
}

/// # Safety
/// `f` must be a live field handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_field_mul(f: *const SaField, a: u32, b: u32, out: *mut u32) -> SaStatus {
    binary(f, a, b, out, |c, a, b| c.mul(a, b))
}

/// a raised to e.
///
/// # Safety
/// `f` must be a live field handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_field_pow(f: *const SaField, a: u32, e: u64, out: *mut u32) -> SaStatus {
    guard(|| {
        let ctx = match field(f) {
            Ok(c) => c,
            Err(s) => return s,
        };
        if let Err(s) = check(ctx, &[a]) {
            return s;
        }
        write(out, ctx.pow(a, e))
    })
}

/// # Safety
/// `f` must be a live field handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_field_inv(f: *const SaField, a: u32, out: *mut u32) -> SaStatus {
    guard(|| {
        let ctx = match field(f) {
            Ok(c) => c,
            Err(s) => return s,
        };
        if let Err(s) = check(ctx, &[a]) {
            return s;
        }
        match ctx.inv(a) {
            Some(v) => write(out, v),
            None => fail(SaStatus::NotInvertible, "zero has no inverse"),
        }
    })
}

/// The i-th power of x -> x^q, q = p^s.
///
/// # Safety
/// `f` must be a live field handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_field_frobenius(f: *const SaField, x: u32, i: u32, out: *mut u32) -> SaStatus {
    guard(|| {
        let ctx = match field(f) {
            Ok(c) => c,
            Err(s) => return s,
        };
        if let Err(s) = check(ctx, &[x]) {
            return s;
        }
        write(out, ctx.frobenius(x, i))
    })
}

/// Order of PGL(3, q).
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_pgl3_order(q: u64, out: *mut u64) -> SaStatus {
    guard(|| match u64::try_from(pgl3_order(q)) {
        Ok(v) => write(out, v),
        Err(_) => fail(SaStatus::Overflow, format!("|PGL(3,{q})| does not fit in 64 bits")),
    })
}

/// Table value for one of the five listed cycle types as num/den.
///
/// # Safety
/// `lambda` must be a NUL-terminated string; `num` and `den` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sa_table1_value(lambda: *const c_char, q: u64, num: *mut i64, den: *mut i64) -> SaStatus {
    guard(|| {
        let lambda = match read_lambda(lambda) {
            Ok(l) => l,
            Err(s) => return s,
        };
        if num.is_null() || den.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let v = match table1_value(&lambda, q) {
            Ok(v) => v,
            Err(e) => return fail(SaStatus::InvalidArgument, e.to_string()),
        };
        match (i64::try_from(v.numer()), i64::try_from(v.denom())) {
            (Ok(n), Ok(d)) => {
                *num = n;
                *den = d;
                SaStatus::Ok
            }
            _ => fail(SaStatus::Overflow, format!("{v} does not fit in 64 bits")),
        }
    })
}

fn threads(jobs: u32) -> usize {
    if jobs == 0 {
        sevenarc::arcs::default_jobs()
    } else {
        jobs as usize
    }
}

/// Counts unordered 7-arcs of cycle type `lambda` over GF(q) on `jobs`
/// threads (0 for all available).
///
/// # Safety
/// `lambda` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_count_arcs(q: u64, lambda: *const c_char, jobs: u32, out: *mut *mut SaReport) -> SaStatus {
    guard(|| {
        let lambda = match read_lambda(lambda) {
            Ok(l) => l,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let job = match ArcCountJob::new(q, lambda) {
            Ok(j) => j,
            Err(e) => return fail(SaStatus::InvalidArgument, e.to_string()),
        };
        let report = job.finish(&run_to_end(&job, threads(jobs)));
        write(out, Box::into_raw(Box::new(SaReport { report })))
    })
}

/// Counts Fano planes of cycle type `lambda` over GF(q).
///
/// # Safety
/// `lambda` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_fano_census(q: u64, lambda: *const c_char, jobs: u32, out: *mut *mut SaReport) -> SaStatus {
    guard(|| {
        let lambda = match read_lambda(lambda) {
            Ok(l) => l,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let job = match FanoCensusJob::new(q, lambda) {
            Ok(j) => j,
            Err(e) => return fail(SaStatus::InvalidArgument, e.to_string()),
        };
        let report = job.finish(&run_to_end(&job, threads(jobs)));
        write(out, Box::into_raw(Box::new(SaReport { report })))
    })
}

/// # Safety
/// `r` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sa_report_free(r: *mut SaReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

unsafe fn report<'a>(r: *const SaReport) -> Result<&'a CountReport, SaStatus> {
    r.as_ref().map(|r| &r.report).ok_or_else(|| fail(SaStatus::NullPointer, "null report"))
}

/// The unordered count.
///
/// # Safety
/// `r` must be a live report handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_report_raw_count(r: *const SaReport, out: *mut u64) -> SaStatus {
    guard(|| match report(r) {
        Ok(rep) => write(out, rep.raw_count),
        Err(s) => s,
    })
}

/// 1 if the count agrees with its registered formula, 0 if not, -1 if no
/// formula is registered.
///
/// # Safety
/// `r` must be a live report handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_report_match(r: *const SaReport, out: *mut i32) -> SaStatus {
    guard(|| match report(r) {
        Ok(rep) => write(out, rep.matches.map_or(-1, i32::from)),
        Err(s) => s,
    })
}

/// The full report as JSON; free with `sa_string_free`.
///
/// # Safety
/// `r` must be a live report handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sa_report_json(r: *const SaReport, out: *mut *mut c_char) -> SaStatus {
    guard(|| match report(r) {
        Ok(rep) => match serde_json::to_string(rep) {
            Ok(s) => write(out, new_string(s)),
            Err(e) => fail(SaStatus::Internal, e.to_string()),
        },
        Err(s) => s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message() -> String {
        let p = sa_last_error_message();
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn panics_become_internal() {
        assert_eq!(guard(|| panic!("boom")), SaStatus::Internal);
        assert_eq!(message(), "boom");
    }

    #[test]
    fn messages_survive_interior_nul() {
        set_error("a\0b");
        assert_eq!(message(), "a b");
    }

    #[test]
    fn errors_are_per_thread() {
        set_error("here");
        let other = std::thread::spawn(|| sa_last_error_message().is_null()).join().unwrap();
        assert!(other);
        assert_eq!(message(), "here");
    }
}
