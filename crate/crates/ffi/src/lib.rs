//! C ABI over the ergospec library.
//!
//! The surface is a handful of opaque handles plus scalar extractors:
//!
//! * `EsWeights` wraps a materialized weight sequence, built either from an
//!   interleaved complex value table or from the same JSON spec the CLI
//!   accepts (explicit values or a generator).
//! * Correlation, amplitude, point-mass and Wiener averages come back as
//!   plain doubles; the almost-periodicity classifier returns its full
//!   report as a JSON string the caller must release with [`es_string_free`].
//! * `es_vdc_gaussian_sweep` runs the seeded van der Corput fuzz campaign
//!   and reports window/violation counts.
//!
//! Every fallible function returns an [`EsStatus`]; on failure the message
//! is stored per thread and can be read with [`es_last_error_message`].
//! Panics never unwind across the boundary; they surface as
//! [`EsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ergospec::config::WeightSpec;
use ergospec::spectral::{empirical_density, point_mass, wiener_continuity};
use ergospec::vandercorput::{vdc_bound_sweep, OperatorArray2D};
use ergospec::weights::{
    amplitude_estimate, classify_besicovitch, correlation_estimate, ClassifyConfig,
    WeightSequence,
};
use ergospec::{Error, MultiIndex, TorusPoint};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter was out of range or inconsistent.
    InvalidArgument = 2,
    /// Axis counts of the arguments disagree.
    DimensionMismatch = 3,
    /// The request needs values outside the materialized box.
    BoxExceeded = 4,
    /// The operator family is not commuting unitaries within tolerance.
    InvalidSystem = 5,
    /// A checked mathematical invariant failed.
    InvariantViolation = 6,
    Io = 7,
    /// Malformed JSON, or JSON not matching the expected schema.
    Json = 8,
    /// A string argument was not valid UTF-8.
    Utf8 = 9,
    /// An internal panic was caught at the boundary.
    Panic = 10,
}

/// Tally of one seeded van der Corput sweep campaign.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EsVdcSummary {
    /// Windows checked across all trials.
    pub windows: u64,
    /// Windows where the bound failed beyond tolerance (expected 0).
    pub violations: u64,
    /// Largest of `lhs - rhs` over all windows; negative when the bound
    /// holds with room.
    pub worst_margin: f64,
}

/// Opaque handle over a materialized weight sequence.
pub struct EsWeights {
    inner: WeightSequence,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(clean).expect("NULs stripped"));
    });
}

fn status_of(e: &Error) -> EsStatus {
    match e {
        Error::DimensionMismatch { .. } => EsStatus::DimensionMismatch,
        Error::InvalidParameter(_) => EsStatus::InvalidArgument,
        Error::BoxExceeded(_) => EsStatus::BoxExceeded,
        Error::InvalidSystem(_) => EsStatus::InvalidSystem,
        Error::InvariantViolation(_) => EsStatus::InvariantViolation,
        Error::Io(_) => EsStatus::Io,
        Error::Json(_) => EsStatus::Json,
    }
}

fn record(e: Error) -> EsStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn invalid(msg: &str) -> EsStatus {
    set_error(msg);
    EsStatus::InvalidArgument
}

fn null_arg(name: &str) -> EsStatus {
    set_error(&format!("argument `{name}` must not be null"));
    EsStatus::NullPointer
}

/// Run a body with panics contained; panics become `EsStatus::Panic`.
fn guarded(f: impl FnOnce() -> EsStatus) -> EsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(&format!("internal panic: {msg}"));
            EsStatus::Panic
        }
    }
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(ptr, len))
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, EsStatus> {
    if ptr.is_null() {
        return Err(EsStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        EsStatus::Utf8
    })
}

unsafe fn weights_arg<'a>(w: *const EsWeights) -> Result<&'a WeightSequence, EsStatus> {
    if w.is_null() {
        Err(null_arg("weights"))
    } else {
        Ok(&(*w).inner)
    }
}

fn index_arg(name: &str, ptr: *const i64, dim: usize) -> Result<MultiIndex, EsStatus> {
    let parts = unsafe { slice_arg(ptr, dim) }.ok_or_else(|| null_arg(name))?;
    if dim == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    Ok(MultiIndex(parts.to_vec()))
}

fn point_arg(name: &str, ptr: *const f64, dim: usize) -> Result<TorusPoint, EsStatus> {
    let parts = unsafe { slice_arg(ptr, dim) }.ok_or_else(|| null_arg(name))?;
    if dim == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    TorusPoint::new(parts.to_vec()).map_err(record)
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> EsStatus {
    if out.is_null() {
        return null_arg(name);
    }
    out.write(value);
    EsStatus::Ok
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn es_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread;
/// do not free it.
#[no_mangle]
pub extern "C" fn es_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Build a weight sequence from an interleaved complex table.
///
/// `box_hi` holds the per-axis upper corner (inclusive, `dim` entries); the
/// table covers `[0, box_hi]` in row-major order, `values` holding
/// `re, im, re, im, ...` with `len` complex entries (so `2 * len` doubles).
///
/// # Safety
///
/// `box_hi` must point to `dim` readable `int64_t`, `values` to `2 * len`
/// readable doubles, and `out` to a writable pointer slot. On success the
/// caller owns the handle and must release it with [`es_weights_free`].
#[no_mangle]
pub unsafe extern "C" fn es_weights_from_values(
    box_hi: *const i64,
    dim: usize,
    values: *const f64,
    len: usize,
    out: *mut *mut EsWeights,
) -> EsStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let n = match index_arg("box_hi", box_hi, dim) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let Some(flat) = slice_arg(values, len.saturating_mul(2)) else {
            return null_arg("values");
        };
        let table: Vec<Complex64> = flat
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        match WeightSequence::from_values(&n, table) {
            Ok(seq) => {
                out.write(Box::into_raw(Box::new(EsWeights { inner: seq })));
                EsStatus::Ok
            }
            Err(e) => record(e),
        }
    })
}

/// Build a weight sequence from a JSON spec (the CLI `weight` object):
/// `{"box": [...], "values": [[re,im],...]}` or `{"box": [...],
/// "generator": {...}}`.
///
/// # Safety
///
/// `spec_json` must be a NUL-terminated string and `out` a writable pointer
/// slot. On success the caller owns the handle and must release it with
/// [`es_weights_free`].
#[no_mangle]
pub unsafe extern "C" fn es_weights_from_json(
    spec_json: *const c_char,
    out: *mut *mut EsWeights,
) -> EsStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let text = match str_arg(spec_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let spec: WeightSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => {
                set_error(&format!("weight spec: {e}"));
                return EsStatus::Json;
            }
        };
        match spec.build() {
            Ok(seq) => {
                out.write(Box::into_raw(Box::new(EsWeights { inner: seq })));
                EsStatus::Ok
            }
            Err(e) => record(e),
        }
    })
}

/// Release a handle obtained from a constructor. Null is a no-op.
///
/// # Safety
///
/// `w` must be null or a pointer previously returned by a constructor and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn es_weights_free(w: *mut EsWeights) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Number of lattice axes of the sequence.
///
/// # Safety
///
/// `w` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn es_weights_dim(w: *const EsWeights, out: *mut usize) -> EsStatus {
    guarded(|| {
        let seq = match weights_arg(w) {
            Ok(s) => s,
            Err(s) => return s,
        };
        write_out(out, seq.dim(), "out")
    })
}

/// Largest modulus over the materialized box.
///
/// # Safety
///
/// `w` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn es_weights_sup_norm(w: *const EsWeights, out: *mut f64) -> EsStatus {
    guarded(|| {
        let seq = match weights_arg(w) {
            Ok(s) => s,
            Err(s) => return s,
        };
        write_out(out, seq.sup_norm(), "out")
    })
}

/// Windowed correlation at lag `m`, truncation `n` (both `dim` entries).
///
/// # Safety
///
/// `w` must be a live handle; `m` and `n` must point to `dim` readable
/// `int64_t`; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn es_weights_correlation(
    w: *const EsWeights,
    m: *const i64,
    n: *const i64,
    dim: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> EsStatus {
    guarded(|| {
        let seq = match weights_arg(w) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let (m, n) = match (index_arg("m", m, dim), index_arg("n", n, dim)) {
            (Ok(m), Ok(n)) => (m, n),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match correlation_estimate(seq, &m, &n) {
            Ok(v) => {
                let s = write_out(out_re, v.re, "out_re");
                if s != EsStatus::Ok {
                    return s;
                }
                write_out(out_im, v.im, "out_im")
            }
            Err(e) => record(e),
        }
    })
}

/// Twisted Cesaro average at the torus point with the given angles
/// (`dim` entries, units of full turns), truncation `n`.
///
/// # Safety
///
/// `w` must be a live handle; `angles` must point to `dim` readable doubles
/// and `n` to `dim` readable `int64_t`; `out_re` and `out_im` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn es_weights_amplitude(
    w: *const EsWeights,
    angles: *const f64,
    n: *const i64,
    dim: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> EsStatus {
    guarded(|| {
        let seq = match weights_arg(w) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let z = match point_arg("angles", angles, dim) {
            Ok(z) => z,
            Err(s) => return s,
        };
        let n = match index_arg("n", n, dim) {
            Ok(n) => n,
            Err(s) => return s,
        };
        match amplitude_estimate(seq, &z, &n) {
            Ok(v) => {
                let s = write_out(out_re, v.re, "out_re");
                if s != EsStatus::Ok {
                    return s;
                }
                write_out(out_im, v.im, "out_im")
            }
            Err(e) => record(e),
        }
    })
}

/// Estimated mass of the atom at the given angles: the empirical spectral
/// density at truncation `n` averaged over the symmetric coefficient window
/// `[-h, h]`.
///
/// # Safety
///
/// `w` must be a live handle; `angles`, `n` and `h` must each point to
/// `dim` readable entries of their type; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn es_weights_point_mass(
    w: *const EsWeights,
    angles: *const f64,
    n: *const i64,
    h: *const i64,
    dim: usize,
    out: *mut f64,
) -> EsStatus {
    guarded(|| {
        let seq = match weights_arg(w) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let z = match point_arg("angles", angles, dim) {
            Ok(z) => z,
            Err(s) => return s,
        };
        let (n, h) = match (index_arg("n", n, dim), index_arg("h", h, dim)) {
            (Ok(n), Ok(h)) => (n, h),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let result = empirical_density(seq, &n).and_then(|dens| point_mass(&dens, &z, &h));
        match result {
            Ok(pm) => write_out(out, pm.value, "out"),
            Err(e) => record(e),
        }
    })
}

/// Wiener continuity average of the empirical spectral density at
/// truncation `n` over the window `[-h, h]`; tends to the sum of squared
/// atom masses.
///
/// # Safety
///
/// `w` must be a live handle; `n` and `h` must point to `dim` readable
/// `int64_t`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn es_weights_wiener(
    w: *const EsWeights,
    n: *const i64,
    h: *const i64,
    dim: usize,
    out: *mut f64,
) -> EsStatus {
    guarded(|| {
        let seq = match weights_arg(w) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let (n, h) = match (index_arg("n", n, dim), index_arg("h", h, dim)) {
            (Ok(n), Ok(h)) => (n, h),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let result = empirical_density(seq, &n).and_then(|dens| wiener_continuity(&dens, &h));
        match result {
            Ok(v) => write_out(out, v, "out"),
            Err(e) => record(e),
        }
    })
}

/// Run the almost-periodicity classifier. `config_json` holds the classifier
/// config (`ladder`, `grid`, optional window and tolerance overrides) and the
/// full report comes back as a JSON string in `out_json`, to be released
/// with [`es_string_free`].
///
/// # Safety
///
/// `w` must be a live handle, `config_json` a NUL-terminated string and
/// `out_json` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn es_weights_classify_json(
    w: *const EsWeights,
    config_json: *const c_char,
    out_json: *mut *mut c_char,
) -> EsStatus {
    guarded(|| {
        if out_json.is_null() {
            return null_arg("out_json");
        }
        let seq = match weights_arg(w) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let text = match str_arg(config_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cfg: ClassifyConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => {
                set_error(&format!("classifier config: {e}"));
                return EsStatus::Json;
            }
        };
        let report = match classify_besicovitch(seq, &cfg) {
            Ok(r) => r,
            Err(e) => return record(e),
        };
        let rendered = serde_json::to_string_pretty(&report).expect("report serializes");
        let cstr = CString::new(rendered.replace('\0', " ")).expect("NULs stripped");
        out_json.write(cstr.into_raw());
        EsStatus::Ok
    })
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
///
/// `s` must be null or a pointer previously returned in an `out_json`
/// argument and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn es_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Seeded van der Corput fuzz campaign: `trials` random Gaussian operator
/// arrays (matrix dimension up to `max_dim`, extents up to
/// `max_n1 x max_n2`), each checked over every admissible window pair.
/// Fills `out` with the tally; a nonzero violation count signals an
/// implementation bug, reported as [`EsStatus::InvariantViolation`].
///
/// # Safety
///
/// `out` must point to a writable [`EsVdcSummary`].
#[no_mangle]
pub unsafe extern "C" fn es_vdc_gaussian_sweep(
    seed: u64,
    trials: u64,
    max_dim: usize,
    max_n1: usize,
    max_n2: usize,
    out: *mut EsVdcSummary,
) -> EsStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        if trials == 0 || max_dim == 0 || max_n1 == 0 || max_n2 == 0 {
            return invalid("trials, max_dim, max_n1 and max_n2 must be >= 1");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut summary = EsVdcSummary { windows: 0, violations: 0, worst_margin: f64::NEG_INFINITY };
        for _ in 0..trials {
            let dim = rng.gen_range(1..=max_dim);
            let n1 = rng.gen_range(1..=max_n1);
            let n2 = rng.gen_range(1..=max_n2);
            let arr = OperatorArray2D::random_gaussian(&mut rng, n1, n2, dim);
            for rep in vdc_bound_sweep(&arr) {
                summary.windows += 1;
                if rep.violation {
                    summary.violations += 1;
                }
                summary.worst_margin = summary.worst_margin.max(rep.lhs - rep.rhs_padded);
            }
        }
        out.write(summary);
        if summary.violations > 0 {
            set_error("van der Corput bound violated; this signals an implementation bug");
            return EsStatus::InvariantViolation;
        }
        EsStatus::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_is_static_and_terminated() {
        let ptr = es_version();
        assert!(!ptr.is_null());
        let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap();
        assert_eq!(text, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn last_error_starts_null_and_updates() {
        LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
        assert!(es_last_error_message().is_null());
        set_error("boom");
        let msg = unsafe { CStr::from_ptr(es_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "boom");
    }

    #[test]
    fn guarded_catches_panics() {
        let status = guarded(|| panic!("exploded"));
        assert_eq!(status, EsStatus::Panic);
        let msg = unsafe { CStr::from_ptr(es_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("exploded"));
    }
}
