use std::ffi::{c_char, CStr, CString};
use std::ptr;

use matchdist_ffi::*;

const EXAMPLE: &str = "bpres 1\ngenerators 1\n0 0\nrelations 2\n1 0 ; 0:1\n0 1 ; 0:1\n";
const EMPTY: &str = "bpres 1\ngenerators 0\nrelations 0\n";

fn parse(text: &str) -> *mut MdPresentation {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { md_presentation_parse(c.as_ptr(), &mut out) }, MdStatus::Ok);
    assert!(!out.is_null());
    out
}

fn take(s: *mut c_char) -> String {
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { md_string_free(s) };
    text
}

fn last_error() -> String {
    let p = md_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn exact_distance_with_witness() {
    let (a, b) = (parse(EXAMPLE), parse(EMPTY));
    unsafe {
        assert_eq!(md_presentation_num_generators(a), 1);
        assert_eq!(md_presentation_num_relations(a), 2);
        let (mut value, mut witness) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(md_exact_distance(a, b, 1, &mut value, &mut witness), MdStatus::Ok);
        assert_eq!(take(value), "1/2");
        let json: serde_json::Value = serde_json::from_str(&take(witness)).unwrap();
        assert_eq!(json["kind"], "vertex");
        let mut value = ptr::null_mut();
        assert_eq!(md_exact_distance(a, a, 0, &mut value, ptr::null_mut()), MdStatus::Ok);
        assert_eq!(take(value), "0");
        md_presentation_free(a);
        md_presentation_free(b);
    }
}

#[test]
fn approx_and_diagram() {
    let (a, b) = (parse(EXAMPLE), parse(EMPTY));
    unsafe {
        let (mut value, mut slice) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(md_approx_distance(a, b, 3, 3, &mut value, &mut slice), MdStatus::Ok);
        assert_eq!(take(value), "1/2");
        assert_eq!(take(slice), r#"{"s":"1","t":"0"}"#);

        let mut bars = ptr::null_mut();
        let (s, t) = (CString::new("2").unwrap(), CString::new("0").unwrap());
        assert_eq!(md_slice_diagram(a, s.as_ptr(), t.as_ptr(), &mut bars), MdStatus::Ok);
        assert_eq!(take(bars), "0 1/2\n");

        let mut value = ptr::null_mut();
        assert_eq!(
            md_approx_distance(a, b, 0, 3, &mut value, ptr::null_mut()),
            MdStatus::InvalidArgument
        );
        assert!(last_error().contains("grid"));
        let bad = CString::new("-1").unwrap();
        assert_eq!(
            md_slice_diagram(a, bad.as_ptr(), t.as_ptr(), &mut bars),
            MdStatus::InvalidArgument
        );
        md_presentation_free(a);
        md_presentation_free(b);
    }
}

#[test]
fn bottleneck_on_text_barcodes() {
    let a = CString::new("0 1\n").unwrap();
    let b = CString::new("0 2\n").unwrap();
    let mut value = ptr::null_mut();
    unsafe {
        assert_eq!(md_bottleneck(a.as_ptr(), b.as_ptr(), &mut value), MdStatus::Ok);
        assert_eq!(take(value), "1");
        let essential = CString::new("0 inf\n").unwrap();
        let empty = CString::new("").unwrap();
        assert_eq!(
            md_bottleneck(essential.as_ptr(), empty.as_ptr(), &mut value),
            MdStatus::Ok
        );
        assert_eq!(take(value), "inf");
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(md_presentation_parse(ptr::null(), &mut out), MdStatus::NullPointer);
        let broken = CString::new("bpres 1\ngenerators 1\n0\n").unwrap();
        assert_eq!(md_presentation_parse(broken.as_ptr(), &mut out), MdStatus::ParseError);
        assert!(last_error().contains("line"));
        assert!(out.is_null());

        let invalid = [0xffu8, 0];
        assert_eq!(
            md_presentation_parse(invalid.as_ptr().cast(), &mut out),
            MdStatus::InvalidUtf8
        );

        let mut value = ptr::null_mut();
        assert_eq!(
            md_exact_distance(ptr::null(), ptr::null(), 0, &mut value, ptr::null_mut()),
            MdStatus::NullPointer
        );

        let ok = parse(EMPTY);
        assert_eq!(
            md_exact_distance(ok, ok, 0, ptr::null_mut(), ptr::null_mut()),
            MdStatus::NullPointer
        );
        md_presentation_free(ok);
        md_presentation_free(ptr::null_mut());
        md_string_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(md_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
