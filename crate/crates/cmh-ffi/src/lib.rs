//! C ABI over the cmh verification library.
//!
//! Conventions:
//! * A `CmhContext` is an opaque handle created by [`cmh_context_new`] and
//!   released by [`cmh_context_free`]; it carries the working precision
//!   and the pass/fail tolerance.
//! * Report-producing calls write a NUL-terminated JSON string through an
//!   out-pointer; the caller frees it with [`cmh_string_free`].  The JSON
//!   is the same record stream the `cmh` command-line tool emits: one
//!   object per identity with `lhs`, `rhs`, `residual` (decimal strings),
//!   `pass`, and string maps `terms` / `parameters`.
//! * Every function returns `CMH_OK` (0) on success or a nonzero error
//!   code; [`cmh_last_error_message`] describes the most recent failure on
//!   the calling thread.  Identity failures are not call failures: a
//!   batch whose residuals exceed the tolerance still returns `CMH_OK`
//!   with `"pass": false` in the records.
//! * All entry points catch panics and convert them to `CMH_ERR_PANIC`;
//!   nothing unwinds across the boundary.

use cmh::cli::{averaged_colmez_records, chowla_selberg_records, cm_type_listing, weilrep_records};
use cmh::report::{decimal_to_rational, render_records, IdentityRecord, OutputFormat};
use cmh::weilrep::FormCoefficients;
use cmh::PrecisionContext;
use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// The call completed; any identity failures are inside the report.
pub const CMH_OK: c_int = 0;
/// A required pointer was NULL.
pub const CMH_ERR_NULL: c_int = 1;
/// An argument failed validation (precision, tolerance, JSON, UTF-8, ...).
pub const CMH_ERR_ARGUMENT: c_int = 2;
/// The computation itself reported an error.
pub const CMH_ERR_COMPUTE: c_int = 3;
/// A panic was caught at the boundary; the handle remains usable.
pub const CMH_ERR_PANIC: c_int = 4;

/// Opaque evaluation context: working precision plus report tolerance.
pub struct CmhContext {
    ctx: PrecisionContext,
    tolerance: String,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(code: c_int, message: &str) -> c_int {
    set_last_error(message);
    code
}

/// Run `body` with panics converted to `CMH_ERR_PANIC`.
fn guarded(body: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".to_string());
            fail(CMH_ERR_PANIC, &format!("panic: {message}"))
        }
    }
}

/// # Safety
/// `ptr` must be a live pointer obtained from `cmh_context_new`.
unsafe fn context_ref<'a>(ptr: *const CmhContext) -> Option<&'a CmhContext> {
    ptr.as_ref()
}

fn records_to_out(records: &[IdentityRecord], out_json: *mut *mut c_char) -> c_int {
    let rendered = match render_records(records, OutputFormat::Json) {
        Ok(r) => r,
        Err(e) => return fail(CMH_ERR_COMPUTE, &e.to_string()),
    };
    string_to_out(rendered, out_json)
}

fn string_to_out(s: String, out_json: *mut *mut c_char) -> c_int {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out_json = c.into_raw() };
            CMH_OK
        }
        Err(_) => fail(CMH_ERR_COMPUTE, "report contained an interior NUL byte"),
    }
}

/// Create a context with the given working precision in decimal digits
/// (minimum 30) and the default tolerance `1e-9`.  Returns NULL on
/// failure; see `cmh_last_error_message`.
#[no_mangle]
pub extern "C" fn cmh_context_new(precision_digits: u32) -> *mut CmhContext {
    let mut out: *mut CmhContext = std::ptr::null_mut();
    guarded(|| match PrecisionContext::new(precision_digits) {
        Ok(ctx) => {
            out = Box::into_raw(Box::new(CmhContext {
                ctx,
                tolerance: "1e-9".to_string(),
            }));
            CMH_OK
        }
        Err(e) => fail(CMH_ERR_ARGUMENT, &e.to_string()),
    });
    out
}

/// Release a context.  NULL is ignored.
///
/// # Safety
/// `ctx` must be NULL or a pointer returned by `cmh_context_new` that has
/// not been freed already.
#[no_mangle]
pub unsafe extern "C" fn cmh_context_free(ctx: *mut CmhContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Replace the pass/fail tolerance (a decimal string such as "1e-12").
///
/// # Safety
/// `ctx` must be a live context pointer; `tolerance` a NUL-terminated
/// UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn cmh_context_set_tolerance(
    ctx: *mut CmhContext,
    tolerance: *const c_char,
) -> c_int {
    guarded(|| {
        if ctx.is_null() || tolerance.is_null() {
            return fail(CMH_ERR_NULL, "cmh_context_set_tolerance: NULL argument");
        }
        let text = match CStr::from_ptr(tolerance).to_str() {
            Ok(t) => t,
            Err(_) => return fail(CMH_ERR_ARGUMENT, "tolerance is not valid UTF-8"),
        };
        match decimal_to_rational(text) {
            Ok(value) if value > num_rational::BigRational::from_integer(0.into()) => {
                (*ctx).tolerance = text.to_string();
                CMH_OK
            }
            Ok(_) => fail(CMH_ERR_ARGUMENT, "tolerance must be positive"),
            Err(e) => fail(CMH_ERR_ARGUMENT, &e.to_string()),
        }
    })
}

/// Verify the Chowla-Selberg identities (three shapes plus the Faltings
/// cross-check) for one fundamental discriminant; writes the JSON record
/// stream to `*out_json`.
///
/// # Safety
/// `ctx` must be a live context pointer and `out_json` a valid location
/// to store a string pointer.
#[no_mangle]
pub unsafe extern "C" fn cmh_chowla_selberg_json(
    ctx: *const CmhContext,
    discriminant: i64,
    out_json: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        let Some(handle) = context_ref(ctx) else {
            return fail(CMH_ERR_NULL, "cmh_chowla_selberg_json: NULL context");
        };
        if out_json.is_null() {
            return fail(CMH_ERR_NULL, "cmh_chowla_selberg_json: NULL out pointer");
        }
        match chowla_selberg_records(&[discriminant], &handle.ctx, &handle.tolerance) {
            Ok(records) => records_to_out(&records, out_json),
            Err(e) => fail(CMH_ERR_COMPUTE, &e.to_string()),
        }
    })
}

/// Verify the averaged Colmez identity and its corollaries for the
/// abelian CM field cut out of the `modulus`-th cyclotomic field by the
/// subgroup generated by `subgroup[0..subgroup_len]`; writes the JSON
/// record stream to `*out_json`.
///
/// # Safety
/// `ctx` and `out_json` as above; `subgroup` must point to
/// `subgroup_len` readable values (it may be NULL when the length is 0).
#[no_mangle]
pub unsafe extern "C" fn cmh_averaged_colmez_json(
    ctx: *const CmhContext,
    modulus: u64,
    subgroup: *const u64,
    subgroup_len: usize,
    out_json: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        let Some(handle) = context_ref(ctx) else {
            return fail(CMH_ERR_NULL, "cmh_averaged_colmez_json: NULL context");
        };
        if out_json.is_null() {
            return fail(CMH_ERR_NULL, "cmh_averaged_colmez_json: NULL out pointer");
        }
        let generators: &[u64] = if subgroup_len == 0 {
            &[]
        } else if subgroup.is_null() {
            return fail(
                CMH_ERR_NULL,
                "cmh_averaged_colmez_json: NULL subgroup with nonzero length",
            );
        } else {
            std::slice::from_raw_parts(subgroup, subgroup_len)
        };
        match averaged_colmez_records(modulus, generators, &handle.ctx, &handle.tolerance) {
            Ok(records) => records_to_out(&records, out_json),
            Err(e) => fail(CMH_ERR_COMPUTE, &e.to_string()),
        }
    })
}

/// Enumerate the CM types of the same field datum as a JSON object
/// (modulus, degree, types with members and reflex data).
///
/// # Safety
/// Pointer contracts as for `cmh_averaged_colmez_json`.
#[no_mangle]
pub unsafe extern "C" fn cmh_cm_types_json(
    modulus: u64,
    subgroup: *const u64,
    subgroup_len: usize,
    out_json: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        if out_json.is_null() {
            return fail(CMH_ERR_NULL, "cmh_cm_types_json: NULL out pointer");
        }
        let generators: &[u64] = if subgroup_len == 0 {
            &[]
        } else if subgroup.is_null() {
            return fail(
                CMH_ERR_NULL,
                "cmh_cm_types_json: NULL subgroup with nonzero length",
            );
        } else {
            std::slice::from_raw_parts(subgroup, subgroup_len)
        };
        match cm_type_listing(modulus, generators) {
            Ok(listing) => match serde_json::to_string_pretty(&listing) {
                Ok(text) => string_to_out(text, out_json),
                Err(e) => fail(CMH_ERR_COMPUTE, &e.to_string()),
            },
            Err(e) => fail(CMH_ERR_ARGUMENT, &e.to_string()),
        }
    })
}

/// The Faltings height of a CM elliptic curve with CM by the maximal
/// order of discriminant `discriminant`, as a double.
///
/// # Safety
/// `ctx` must be a live context pointer and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn cmh_cm_elliptic_faltings(
    ctx: *const CmhContext,
    discriminant: i64,
    out_value: *mut c_double,
) -> c_int {
    guarded(|| {
        let Some(handle) = context_ref(ctx) else {
            return fail(CMH_ERR_NULL, "cmh_cm_elliptic_faltings: NULL context");
        };
        if out_value.is_null() {
            return fail(CMH_ERR_NULL, "cmh_cm_elliptic_faltings: NULL out pointer");
        }
        match cmh::heights::cm_elliptic_faltings(discriminant, &handle.ctx) {
            Ok(value) => {
                *out_value = value.to_f64();
                CMH_OK
            }
            Err(e) => fail(CMH_ERR_ARGUMENT, &e.to_string()),
        }
    })
}

/// Check the Weil representation relations for the even Gram matrix given
/// as a JSON array of arrays (e.g. "[[2,1],[1,2]]"); optionally validate
/// form coefficients given as the JSON object accepted by the CLI
/// (`{"weight": "p/q", "entries": [{"m": ..., "mu": [...], "c": ...}]}`;
/// pass NULL to skip).  Writes the JSON record stream to `*out_json`.
///
/// # Safety
/// `ctx` and `out_json` as above; `gram_json` must be a NUL-terminated
/// UTF-8 string, and `form_json` NULL or likewise.
#[no_mangle]
pub unsafe extern "C" fn cmh_weilrep_check_json(
    ctx: *const CmhContext,
    gram_json: *const c_char,
    form_json: *const c_char,
    out_json: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        let Some(handle) = context_ref(ctx) else {
            return fail(CMH_ERR_NULL, "cmh_weilrep_check_json: NULL context");
        };
        if gram_json.is_null() || out_json.is_null() {
            return fail(CMH_ERR_NULL, "cmh_weilrep_check_json: NULL argument");
        }
        let gram_text = match CStr::from_ptr(gram_json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(CMH_ERR_ARGUMENT, "gram matrix is not valid UTF-8"),
        };
        let gram: Vec<Vec<i64>> = match serde_json::from_str(gram_text) {
            Ok(g) => g,
            Err(e) => return fail(CMH_ERR_ARGUMENT, &format!("gram matrix: {e}")),
        };
        let coeffs: Option<FormCoefficients> = if form_json.is_null() {
            None
        } else {
            let form_text = match CStr::from_ptr(form_json).to_str() {
                Ok(t) => t,
                Err(_) => {
                    return fail(CMH_ERR_ARGUMENT, "form coefficients are not valid UTF-8")
                }
            };
            match serde_json::from_str(form_text) {
                Ok(c) => Some(c),
                Err(e) => return fail(CMH_ERR_ARGUMENT, &format!("form coefficients: {e}")),
            }
        };
        match weilrep_records(&gram, coeffs.as_ref(), &handle.ctx, &handle.tolerance) {
            Ok(records) => records_to_out(&records, out_json),
            Err(e) => fail(CMH_ERR_COMPUTE, &e.to_string()),
        }
    })
}

/// Free a string returned through an out-pointer.  NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer produced by this library that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn cmh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Description of the most recent failure on the calling thread, or an
/// empty string.  The pointer is owned by the library and valid until the
/// next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn cmh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// The library version as a static string; do not free it.
#[no_mangle]
pub extern "C" fn cmh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
