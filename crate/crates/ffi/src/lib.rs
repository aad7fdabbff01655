//! C interface. Every function returns an [`SclStatus`]; results go through
//! out-pointers. Handles are opaque and must be released with the matching
//! `_free` function. The message of the last failure on the calling thread
//! is available from [`scl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scl_hodge::complex::homology::betti_numbers;
use scl_hodge::complex::io::parse_complex;
use scl_hodge::complex::{Chain, OrientedComplex};
use scl_hodge::geometry::{torus_mesh, MetricData};
use scl_hodge::growth::{growth_rate, VectorNorm};
use scl_hodge::isoperimetry::{fill_norm, LpMode};
use scl_hodge::whitney::{Mode, WhitneyOptions, WhitneyStructure};
use scl_hodge::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SclStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Numerical = 3,
    InvalidUtf8 = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// A complex together with its edge lengths.
pub struct SclComplex {
    complex: OrientedComplex,
    metric: MetricData,
}

/// Assembled Whitney mass matrices of a complex.
pub struct SclWhitney {
    inner: WhitneyStructure,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn from_error(e: Error) -> SclStatus {
    let code = if e.is_validation() { SclStatus::Validation } else { SclStatus::Numerical };
    set_error(e.to_string());
    code
}

fn guard(f: impl FnOnce() -> Result<(), SclStatus>) -> SclStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SclStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            SclStatus::Panic
        }
    }
}

fn null() -> SclStatus {
    set_error("null pointer argument".into());
    SclStatus::NullPointer
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string. `len` receives the message length without the
/// terminator.
///
/// # Safety
/// `buf` must be valid for `cap` bytes or null with `cap == 0`; `len` must be
/// valid or null.
#[no_mangle]
pub unsafe extern "C" fn scl_last_error(buf: *mut c_char, cap: usize, len: *mut usize) -> SclStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    if !len.is_null() {
        *len = msg.len();
    }
    if cap == 0 {
        return if msg.is_empty() { SclStatus::Ok } else { SclStatus::BufferTooSmall };
    }
    if buf.is_null() {
        return SclStatus::NullPointer;
    }
    let n = msg.len().min(cap - 1);
    ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
    *buf.add(n) = 0;
    if n < msg.len() {
        SclStatus::BufferTooSmall
    } else {
        SclStatus::Ok
    }
}

/// Parses a complex in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scl_complex_parse(text: *const c_char, out: *mut *mut SclComplex) -> SclStatus {
    if text.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let s = CStr::from_ptr(text).to_str().map_err(|_| {
            set_error("input is not UTF-8".into());
            SclStatus::InvalidUtf8
        })?;
        let (complex, metric) = parse_complex(s).map_err(from_error)?;
        *out = Box::into_raw(Box::new(SclComplex { complex, metric }));
        Ok(())
    })
}

/// Flat torus with `n` cells per side in dimension `dim`, lattice spacing `spacing`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scl_torus_new(n: usize, dim: usize, spacing: f64, out: *mut *mut SclComplex) -> SclStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let t = torus_mesh(n, dim, spacing).map_err(from_error)?;
        *out = Box::into_raw(Box::new(SclComplex { complex: t.complex, metric: t.metric }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scl_complex_free(h: *mut SclComplex) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Dimension of the complex.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scl_complex_dim(h: *const SclComplex, out: *mut usize) -> SclStatus {
    if h.is_null() || out.is_null() {
        return null();
    }
    *out = (*h).complex.dim();
    SclStatus::Ok
}

/// Number of simplices of degree `k`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scl_complex_count(h: *const SclComplex, k: usize, out: *mut usize) -> SclStatus {
    if h.is_null() || out.is_null() {
        return null();
    }
    let c = &(*h).complex;
    if k > c.dim() {
        return from_error(Error::DegreeOutOfRange { degree: k, dim: c.dim() });
    }
    *out = c.count(k);
    SclStatus::Ok
}

/// Writes the Betti numbers into `out[0..=dim]`.
///
/// # Safety
/// `out` must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn scl_complex_betti(h: *const SclComplex, out: *mut usize, cap: usize) -> SclStatus {
    if h.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let b = betti_numbers(&(*h).complex);
        if cap < b.len() {
            set_error(format!("need room for {} values", b.len()));
            return Err(SclStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(b.as_ptr(), out, b.len());
        Ok(())
    })
}

/// Assembles mass matrices with quadrature order `order`; `smoothed`
/// selects the mollified partition of unity.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scl_whitney_new(
    h: *const SclComplex,
    order: usize,
    smoothed: bool,
    out: *mut *mut SclWhitney,
) -> SclStatus {
    if h.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let mode = if smoothed { Mode::Smoothed } else { Mode::Standard };
        let opts = WhitneyOptions { order, mode, ..Default::default() };
        let inner = WhitneyStructure::assemble(&(*h).complex, &(*h).metric, opts).map_err(from_error)?;
        *out = Box::into_raw(Box::new(SclWhitney { inner }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scl_whitney_free(h: *mut SclWhitney) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Smallest positive coexact eigenvalue in degree `degree`.
///
/// # Safety
/// `w` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scl_coexact_gap(w: *const SclWhitney, degree: usize, out: *mut f64) -> SclStatus {
    if w.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        *out = (*w).inner.coexact_gap(degree).map_err(from_error)?.value;
        Ok(())
    })
}

/// Filling norm of the 1-cycle `z` (one coefficient per edge). `exact`
/// selects rational arithmetic.
///
/// # Safety
/// `z` must be valid for `len` reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn scl_fill_norm(
    h: *const SclComplex,
    z: *const f64,
    len: usize,
    exact: bool,
    out: *mut f64,
) -> SclStatus {
    if h.is_null() || z.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let chain = Chain::new(1, std::slice::from_raw_parts(z, len).to_vec());
        let mode = if exact { LpMode::Rational } else { LpMode::Float };
        *out = fill_norm(&(*h).complex, &chain, mode).map_err(from_error)?.value;
        Ok(())
    })
}

/// Last growth ratio `‖Fⁿa‖₂ / ‖Fⁿ⁻¹a‖₂` for the class `a[0..4]`.
///
/// # Safety
/// `a` must be valid for 4 reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn scl_growth_ratio(a: *const i64, n: u32, out: *mut f64) -> SclStatus {
    if a.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let mut v = [0i64; 4];
        v.copy_from_slice(std::slice::from_raw_parts(a, 4));
        let r = growth_rate(&v, n, VectorNorm::L2).map_err(from_error)?;
        *out = *r.ratios.last().unwrap_or(&f64::NAN);
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn scl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
