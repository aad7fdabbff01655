use std::ffi::{CStr, CString};
use std::ptr;

use scl_hodge_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let mut len = 0usize;
    unsafe { scl_last_error(buf.as_mut_ptr(), buf.len(), &mut len) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

const SPHERE: &str = "dim 2\ncurvature 0\nsimplex 2 1 2 3\nsimplex 2 0 2 3\nsimplex 2 0 1 3\nsimplex 2 0 1 2\n\
length 0 1 1\nlength 0 2 1\nlength 0 3 1\nlength 1 2 1\nlength 1 3 1\nlength 2 3 1\n";

#[test]
fn parse_and_betti() {
    let text = CString::new(SPHERE).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { scl_complex_parse(text.as_ptr(), &mut h) }, SclStatus::Ok);
    let mut b = [0usize; 3];
    assert_eq!(unsafe { scl_complex_betti(h, b.as_mut_ptr(), 3) }, SclStatus::Ok);
    assert_eq!(b, [1, 0, 1]);
    let mut small = [0usize; 2];
    assert_eq!(unsafe { scl_complex_betti(h, small.as_mut_ptr(), 2) }, SclStatus::BufferTooSmall);
    let mut n = 0;
    assert_eq!(unsafe { scl_complex_count(h, 1, &mut n) }, SclStatus::Ok);
    assert_eq!(n, 6);
    assert_eq!(unsafe { scl_complex_count(h, 5, &mut n) }, SclStatus::Validation);
    unsafe { scl_complex_free(h) };
}

#[test]
fn face_boundary_fills_with_one() {
    let text = CString::new(SPHERE).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { scl_complex_parse(text.as_ptr(), &mut h) }, SclStatus::Ok);
    // edges in sorted order: 01 02 03 12 13 23; boundary of the face 012
    let z = [1.0, -1.0, 0.0, 1.0, 0.0, 0.0];
    let mut v = 0.0;
    assert_eq!(unsafe { scl_fill_norm(h, z.as_ptr(), z.len(), true, &mut v) }, SclStatus::Ok);
    assert_eq!(v, 1.0);
    let not_cycle = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    assert_eq!(unsafe { scl_fill_norm(h, not_cycle.as_ptr(), 6, false, &mut v) }, SclStatus::Validation);
    assert!(last_error().contains("not a cycle"));
    unsafe { scl_complex_free(h) };
}

#[test]
fn torus_gap_and_errors() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { scl_torus_new(4, 2, 0.25, &mut h) }, SclStatus::Ok);
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { scl_whitney_new(h, 4, false, &mut w) }, SclStatus::Ok);
    let mut gap = 0.0;
    assert_eq!(unsafe { scl_coexact_gap(w, 1, &mut gap) }, SclStatus::Ok);
    assert!(gap > 0.0 && gap.is_finite());
    unsafe {
        scl_whitney_free(w);
        scl_complex_free(h);
    }
    assert_eq!(unsafe { scl_torus_new(1, 2, 1.0, &mut h) }, SclStatus::Validation);
    assert_eq!(unsafe { scl_torus_new(4, 2, 1.0, ptr::null_mut()) }, SclStatus::NullPointer);
    let bad = CString::new("dim x\n").unwrap();
    assert_eq!(unsafe { scl_complex_parse(bad.as_ptr(), &mut h) }, SclStatus::Validation);
    assert!(last_error().starts_with("parse error at line 1"));
}

#[test]
fn growth_ratio_limit() {
    let a = [1i64, 0, 0, 0];
    let mut r = 0.0;
    assert_eq!(unsafe { scl_growth_ratio(a.as_ptr(), 30, &mut r) }, SclStatus::Ok);
    assert!((r - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-6);
    let zero = [0i64; 4];
    assert_eq!(unsafe { scl_growth_ratio(zero.as_ptr(), 30, &mut r) }, SclStatus::Validation);
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/scl_hodge.h")).unwrap();
    for name in ["scl_complex_parse", "scl_whitney_new", "scl_fill_norm", "scl_last_error", "typedef struct SclComplex SclComplex"] {
        assert!(header.contains(name), "{name}");
    }
    let v = unsafe { CStr::from_ptr(scl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
