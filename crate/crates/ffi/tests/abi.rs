//! Exercises the C entry points from Rust: handle lifecycle, value
//! extraction against closed forms, error mapping and string ownership.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use ergospec_ffi::{
    es_last_error_message, es_string_free, es_vdc_gaussian_sweep, es_version,
    es_weights_amplitude, es_weights_classify_json, es_weights_correlation, es_weights_dim,
    es_weights_free, es_weights_from_json, es_weights_from_values, es_weights_point_mass,
    es_weights_sup_norm, es_weights_wiener, EsStatus, EsVdcSummary, EsWeights,
};

fn last_error() -> String {
    let ptr = es_last_error_message();
    assert!(!ptr.is_null(), "an error message should have been recorded");
    unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string()
}

/// `a(k) = i^k` on `[0, 3]`, interleaved re/im.
fn quarter_turn_values() -> Vec<f64> {
    vec![1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0]
}

fn build_quarter_turn() -> *mut EsWeights {
    let values = quarter_turn_values();
    let mut handle: *mut EsWeights = ptr::null_mut();
    let status = unsafe {
        es_weights_from_values([3i64].as_ptr(), 1, values.as_ptr(), 4, &mut handle)
    };
    assert_eq!(status, EsStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn build_from_spec(spec: &str) -> *mut EsWeights {
    let spec = CString::new(spec).unwrap();
    let mut handle: *mut EsWeights = ptr::null_mut();
    let status = unsafe { es_weights_from_json(spec.as_ptr(), &mut handle) };
    assert_eq!(status, EsStatus::Ok, "{}", last_error());
    handle
}

#[test]
fn version_matches_the_crate() {
    let text = unsafe { CStr::from_ptr(es_version()) }.to_str().unwrap();
    assert!(text.contains('.'), "{text}");
}

#[test]
fn values_round_trip_through_correlation_and_amplitude() {
    let w = build_quarter_turn();
    unsafe {
        let mut dim = 0usize;
        assert_eq!(es_weights_dim(w, &mut dim), EsStatus::Ok);
        assert_eq!(dim, 1);

        let mut sup = 0.0f64;
        assert_eq!(es_weights_sup_norm(w, &mut sup), EsStatus::Ok);
        assert!((sup - 1.0).abs() < 1e-15);

        // gamma(1) at n = 2: each product conj(i^k) i^(k+1) = i.
        let (mut re, mut im) = (0.0f64, 0.0f64);
        let status =
            es_weights_correlation(w, [1i64].as_ptr(), [2i64].as_ptr(), 1, &mut re, &mut im);
        assert_eq!(status, EsStatus::Ok);
        assert!(re.abs() < 1e-15 && (im - 1.0).abs() < 1e-15, "{re} + {im}i");

        // Twist by the same quarter turn: every term becomes 1.
        let status =
            es_weights_amplitude(w, [0.25f64].as_ptr(), [3i64].as_ptr(), 1, &mut re, &mut im);
        assert_eq!(status, EsStatus::Ok);
        assert!((re - 1.0).abs() < 1e-15 && im.abs() < 1e-15, "{re} + {im}i");

        es_weights_free(w);
    }
}

#[test]
fn json_spec_builds_and_extracts_point_mass() {
    let w = build_from_spec(
        r#"{"box": [4096], "generator": {"kind": "trigpoly", "poly": {
            "dim": 1, "terms": [{"freq": [0.25], "coeff": [1.0, 0.0]}]}}}"#,
    );
    unsafe {
        let mut mass = 0.0f64;
        let status = es_weights_point_mass(
            w,
            [0.25f64].as_ptr(),
            [4096i64].as_ptr(),
            [64i64].as_ptr(),
            1,
            &mut mass,
        );
        assert_eq!(status, EsStatus::Ok, "{}", last_error());
        assert!((mass - 1.0).abs() < 0.05, "{mass}");

        // For a single unit-mass atom the density coefficients carry the
        // triangular taper (n+1-|l|)/(n+1) exactly, so the Wiener average
        // has a closed form.
        let (n, h) = (4096i64, 64i64);
        let mut wiener = 0.0f64;
        let status = es_weights_wiener(w, [n].as_ptr(), [h].as_ptr(), 1, &mut wiener);
        assert_eq!(status, EsStatus::Ok);
        let expect: f64 = (-h..=h)
            .map(|l| ((n + 1 - l.abs()) as f64 / (n + 1) as f64).powi(2))
            .sum::<f64>()
            / (2 * h + 1) as f64;
        assert!((wiener - expect).abs() < 1e-12, "{wiener} vs {expect}");

        es_weights_free(w);
    }
}

#[test]
fn classifier_returns_owned_json() {
    let w = build_from_spec(
        r#"{"box": [4100], "generator": {"kind": "trigpoly", "poly": {
            "dim": 1, "terms": [{"freq": [0.3], "coeff": [1.0, 0.0]}]}}}"#,
    );
    let config = CString::new(
        r#"{"ladder": [[1023], [2047], [4095]], "grid": [[0.3]], "pointmass_halfwidth": 256}"#,
    )
    .unwrap();
    unsafe {
        let mut out: *mut c_char = ptr::null_mut();
        let status = es_weights_classify_json(w, config.as_ptr(), &mut out);
        assert_eq!(status, EsStatus::Ok, "{}", last_error());
        assert!(!out.is_null());
        let report: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        assert_eq!(report["verdict"], "consistent-with-bounded-Besicovitch");
        es_string_free(out);
        es_weights_free(w);
    }
}

#[test]
fn error_paths_map_to_statuses() {
    unsafe {
        // Null output slot.
        let values = quarter_turn_values();
        let status = es_weights_from_values(
            [3i64].as_ptr(),
            1,
            values.as_ptr(),
            4,
            ptr::null_mut(),
        );
        assert_eq!(status, EsStatus::NullPointer);

        // Malformed JSON.
        let bad = CString::new("{not json").unwrap();
        let mut handle: *mut EsWeights = ptr::null_mut();
        assert_eq!(
            es_weights_from_json(bad.as_ptr(), &mut handle),
            EsStatus::Json
        );
        assert!(handle.is_null());

        // Value count not matching the box.
        let status =
            es_weights_from_values([7i64].as_ptr(), 1, values.as_ptr(), 4, &mut handle);
        assert_eq!(status, EsStatus::InvalidArgument);
        assert!(last_error().contains("box"), "{}", last_error());

        let w = build_quarter_turn();
        let (mut re, mut im) = (0.0f64, 0.0f64);

        // Lag/truncation with the wrong axis count.
        let status = es_weights_correlation(
            w,
            [1i64, 1].as_ptr(),
            [2i64, 2].as_ptr(),
            2,
            &mut re,
            &mut im,
        );
        assert_eq!(status, EsStatus::DimensionMismatch);

        // Explicit value tables zero-extend, but generator-backed sequences
        // refuse to read beyond the materialized box.
        let gen = build_from_spec(
            r#"{"box": [100], "generator": {"kind": "example59", "d": 1}}"#,
        );
        let status = es_weights_correlation(
            gen,
            [1i64].as_ptr(),
            [200i64].as_ptr(),
            1,
            &mut re,
            &mut im,
        );
        assert_eq!(status, EsStatus::BoxExceeded);
        es_weights_free(gen);

        // Null handle.
        let status = es_weights_sup_norm(ptr::null(), &mut re);
        assert_eq!(status, EsStatus::NullPointer);

        es_weights_free(w);
        // Frees of null are no-ops.
        es_weights_free(ptr::null_mut());
        es_string_free(ptr::null_mut());
    }
}

#[test]
fn vdc_sweep_is_clean_and_validates_parameters() {
    unsafe {
        let mut summary = EsVdcSummary { windows: 0, violations: 0, worst_margin: 0.0 };
        let status = es_vdc_gaussian_sweep(5, 50, 3, 6, 6, &mut summary);
        assert_eq!(status, EsStatus::Ok, "{}", last_error());
        assert!(summary.windows > 50);
        assert_eq!(summary.violations, 0);
        assert!(summary.worst_margin < 1e-10, "{}", summary.worst_margin);

        assert_eq!(
            es_vdc_gaussian_sweep(5, 0, 3, 6, 6, &mut summary),
            EsStatus::InvalidArgument
        );
        assert_eq!(
            es_vdc_gaussian_sweep(5, 50, 3, 6, 6, ptr::null_mut()),
            EsStatus::NullPointer
        );
    }
}
