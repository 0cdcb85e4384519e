//! Exercises the C ABI from Rust: lifecycle, error codes, JSON payloads,
//! and the null-pointer contracts.

use cmh_ffi::*;
use std::ffi::{c_char, CStr, CString};

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .expect("valid UTF-8")
        .to_string();
    unsafe { cmh_string_free(ptr) };
    text
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cmh_last_error_message()) }
        .to_str()
        .expect("valid UTF-8")
        .to_string()
}

fn records(json: &str) -> Vec<serde_json::Value> {
    serde_json::from_str(json).expect("record stream parses")
}

fn all_pass(items: &[serde_json::Value]) -> bool {
    items.iter().all(|r| r["pass"] == serde_json::Value::Bool(true))
}

#[test]
fn context_lifecycle_and_tolerance() {
    let ctx = cmh_context_new(50);
    assert!(!ctx.is_null());
    let good = CString::new("1e-12").unwrap();
    assert_eq!(unsafe { cmh_context_set_tolerance(ctx, good.as_ptr()) }, CMH_OK);
    let bad = CString::new("not a number").unwrap();
    assert_eq!(
        unsafe { cmh_context_set_tolerance(ctx, bad.as_ptr()) },
        CMH_ERR_ARGUMENT
    );
    assert!(last_error().contains("not a number"));
    let negative = CString::new("-1e-9").unwrap();
    assert_eq!(
        unsafe { cmh_context_set_tolerance(ctx, negative.as_ptr()) },
        CMH_ERR_ARGUMENT
    );
    unsafe { cmh_context_free(ctx) };
    unsafe { cmh_context_free(std::ptr::null_mut()) };
}

#[test]
fn rejects_insufficient_precision() {
    let ctx = cmh_context_new(10);
    assert!(ctx.is_null());
    assert!(last_error().contains("precision"));
}

#[test]
fn chowla_selberg_payload_passes() {
    let ctx = cmh_context_new(50);
    let mut out: *mut c_char = std::ptr::null_mut();
    let code = unsafe { cmh_chowla_selberg_json(ctx, -23, &mut out) };
    assert_eq!(code, CMH_OK);
    let items = records(&take_string(out));
    assert_eq!(items.len(), 4);
    assert!(all_pass(&items));
    assert_eq!(items[0]["identity"], "chowla-selberg-product");
    unsafe { cmh_context_free(ctx) };
}

#[test]
fn invalid_discriminant_is_a_failing_record_not_a_call_failure() {
    let ctx = cmh_context_new(50);
    let mut out: *mut c_char = std::ptr::null_mut();
    let code = unsafe { cmh_chowla_selberg_json(ctx, -5, &mut out) };
    assert_eq!(code, CMH_OK);
    let items = records(&take_string(out));
    assert_eq!(items.len(), 1);
    assert_eq!(items[0]["pass"], false);
    assert!(items[0]["parameters"]["error"].is_string());
    unsafe { cmh_context_free(ctx) };
}

#[test]
fn averaged_colmez_payload_passes() {
    let ctx = cmh_context_new(50);
    let subgroup = [3u64];
    let mut out: *mut c_char = std::ptr::null_mut();
    let code =
        unsafe { cmh_averaged_colmez_json(ctx, 8, subgroup.as_ptr(), subgroup.len(), &mut out) };
    assert_eq!(code, CMH_OK);
    let items = records(&take_string(out));
    assert_eq!(items.len(), 4);
    assert!(all_pass(&items));
    // full cyclotomic field: NULL subgroup pointer with zero length
    let mut out2: *mut c_char = std::ptr::null_mut();
    let code2 =
        unsafe { cmh_averaged_colmez_json(ctx, 5, std::ptr::null(), 0, &mut out2) };
    assert_eq!(code2, CMH_OK);
    assert!(all_pass(&records(&take_string(out2))));
    unsafe { cmh_context_free(ctx) };
}

#[test]
fn cm_types_listing_shape() {
    let mut out: *mut c_char = std::ptr::null_mut();
    let code = unsafe { cmh_cm_types_json(5, std::ptr::null(), 0, &mut out) };
    assert_eq!(code, CMH_OK);
    let listing: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(listing["cm_type_count"], 4);
    // a non-CM datum is an argument error at this boundary
    let mut out2: *mut c_char = std::ptr::null_mut();
    let subgroup = [7u64];
    let code2 = unsafe { cmh_cm_types_json(8, subgroup.as_ptr(), 1, &mut out2) };
    assert_eq!(code2, CMH_ERR_ARGUMENT);
    assert!(out2.is_null());
}

#[test]
fn faltings_height_as_double() {
    let ctx = cmh_context_new(50);
    let mut value = 0.0f64;
    let code = unsafe { cmh_cm_elliptic_faltings(ctx, -4, &mut value) };
    assert_eq!(code, CMH_OK);
    assert!((value - (-1.6571065161914821)).abs() < 1e-12);
    let code_bad = unsafe { cmh_cm_elliptic_faltings(ctx, -5, &mut value) };
    assert_eq!(code_bad, CMH_ERR_ARGUMENT);
    unsafe { cmh_context_free(ctx) };
}

#[test]
fn weilrep_check_with_and_without_form() {
    let ctx = cmh_context_new(50);
    let gram = CString::new("[[2,1],[1,2]]").unwrap();
    let mut out: *mut c_char = std::ptr::null_mut();
    let code =
        unsafe { cmh_weilrep_check_json(ctx, gram.as_ptr(), std::ptr::null(), &mut out) };
    assert_eq!(code, CMH_OK);
    let items = records(&take_string(out));
    assert_eq!(items.len(), 7);
    assert!(all_pass(&items));

    let gram2 = CString::new("[[2]]").unwrap();
    let form = CString::new(
        r#"{"weight": "1/2", "entries": [{"m": "-5/4", "mu": [1], "c": 1}]}"#,
    )
    .unwrap();
    let mut out2: *mut c_char = std::ptr::null_mut();
    let code2 =
        unsafe { cmh_weilrep_check_json(ctx, gram2.as_ptr(), form.as_ptr(), &mut out2) };
    assert_eq!(code2, CMH_OK);
    let items2 = records(&take_string(out2));
    assert_eq!(items2.len(), 8);
    assert!(all_pass(&items2));

    let broken = CString::new("[[2,1],[1]]").unwrap();
    let mut out3: *mut c_char = std::ptr::null_mut();
    let code3 =
        unsafe { cmh_weilrep_check_json(ctx, broken.as_ptr(), std::ptr::null(), &mut out3) };
    // a ragged array parses, so the shape complaint comes from validation
    assert_eq!(code3, CMH_OK);
    let items3 = records(&take_string(out3));
    assert_eq!(items3[0]["pass"], false);
    unsafe { cmh_context_free(ctx) };
}

#[test]
fn null_pointer_contracts() {
    let mut out: *mut c_char = std::ptr::null_mut();
    assert_eq!(
        unsafe { cmh_chowla_selberg_json(std::ptr::null(), -4, &mut out) },
        CMH_ERR_NULL
    );
    let ctx = cmh_context_new(50);
    assert_eq!(
        unsafe { cmh_chowla_selberg_json(ctx, -4, std::ptr::null_mut()) },
        CMH_ERR_NULL
    );
    let subgroup = [3u64];
    assert_eq!(
        unsafe { cmh_averaged_colmez_json(ctx, 8, std::ptr::null(), subgroup.len(), &mut out) },
        CMH_ERR_NULL
    );
    assert_eq!(
        unsafe { cmh_weilrep_check_json(ctx, std::ptr::null(), std::ptr::null(), &mut out) },
        CMH_ERR_NULL
    );
    unsafe { cmh_context_free(ctx) };
}

#[test]
fn version_string_is_populated() {
    let version = unsafe { CStr::from_ptr(cmh_version()) };
    assert!(!version.to_bytes().is_empty());
}
