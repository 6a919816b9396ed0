//! End-to-end runs of the `ergospec` binary: config in, report out, exit
//! codes and report fields checked against closed-form expectations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergospec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_vec_pretty(value).unwrap()).unwrap();
    path
}

fn report(out: &Output) -> Value {
    assert!(
        !out.stdout.is_empty(),
        "no report; stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn results(out: &Output) -> Value {
    report(out)["payload"]["results"].clone()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn two_atom_weight(extent: i64) -> Value {
    json!({
        "box": [extent],
        "generator": {"kind": "trigpoly", "poly": {"dim": 1, "terms": [
            {"freq": [0.3], "coeff": [0.8, 0.0]},
            {"freq": [0.7], "coeff": [0.0, 0.6]}
        ]}}
    })
}

#[test]
fn analyze_reports_atom_masses_within_tolerance() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "analyze.json",
        &json!({
            "weight": two_atom_weight(4101),
            "ladder": [[1024], [4096]],
            "points": [[0.3], [0.7], [0.5]],
            "pointmass_halfwidth": 256
        }),
    );
    let out = run(&["weight", "analyze", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    assert_eq!(res["appears_in_s"], json!(true));
    let masses: Vec<f64> = res["point_masses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["top_mass"].as_f64().unwrap())
        .collect();
    assert!((masses[0] - 0.64).abs() < 0.05, "{masses:?}");
    assert!((masses[1] - 0.36).abs() < 0.05, "{masses:?}");
    assert!(masses[2].abs() < 0.05, "{masses:?}");
}

#[test]
fn analyze_sign_flip_correlations_near_one() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "analyze59.json",
        &json!({
            "weight": {"box": [20010], "generator": {"kind": "example59", "d": 1}},
            "ladder": [[10000], [20000]],
            "correlation_halfwidth": 5
        }),
    );
    let out = run(&["weight", "analyze", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for row in results(&out)["correlations"].as_array().unwrap() {
        let re = row["re"].as_f64().unwrap();
        let im = row["im"].as_f64().unwrap();
        let dist = ((re - 1.0).powi(2) + im * im).sqrt();
        assert!(dist <= 0.05, "lag {:?}: {re} + {im}i", row["m"]);
    }
}

#[test]
fn analyze_rejects_empty_values_with_exit_two() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "empty.json",
        &json!({"weight": {"box": [3], "values": []}, "ladder": [[2], [3]]}),
    );
    let out = run(&["weight", "analyze", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn analyze_csv_emits_the_correlation_table() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "csv.json",
        &json!({
            "weight": two_atom_weight(1030),
            "ladder": [[512], [1024]],
            "correlation_halfwidth": 2
        }),
    );
    let out = run(&[
        "weight",
        "analyze",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("m1,re,im,ladder_spread\n"), "{text}");
    assert_eq!(text.lines().count(), 6, "{text}");
}

#[test]
fn classify_trig_polynomial_is_consistent() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "classify_poly.json",
        &json!({
            "weight": two_atom_weight(4101),
            "ladder": [[1023], [2047], [4095]],
            "grid": [[0.3], [0.7]]
        }),
    );
    let out = run(&["weight", "classify", "--config", config.to_str().unwrap()]);
    let res = results(&out);
    assert_eq!(
        res["verdict"],
        json!("consistent-with-bounded-Besicovitch"),
        "{:?}",
        res["reasons"]
    );
    assert_eq!(code(&out), 0);
}

#[test]
fn classify_sign_flip_is_never_consistent() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "classify59.json",
        &json!({
            "weight": {"box": [100010], "generator": {"kind": "example59", "d": 1}},
            "ladder": [[6250], [12500], [25000], [50000], [100000]],
            "grid": [[0.0]],
            "pointmass_halfwidth": 512
        }),
    );
    let out = run(&["weight", "classify", "--config", config.to_str().unwrap()]);
    let res = results(&out);
    let verdict = res["verdict"].as_str().unwrap();
    assert!(
        verdict == "fails-(3)" || verdict == "inconclusive-(2)",
        "verdict {verdict}, reasons {:?}",
        res["reasons"]
    );
    assert!(code(&out) == 12 || code(&out) == 13);
}

#[test]
fn classify_noise_fails_condition_one_with_exit_ten() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let values: Vec<[f64; 2]> = (0..8192)
        .map(|_| if rng.gen_bool(0.5) { [1.0, 0.0] } else { [-1.0, 0.0] })
        .collect();
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "classify_noise.json",
        &json!({
            "weight": {"box": [8191], "values": values},
            "ladder": [[1023], [2046], [4092], [8185]],
            "grid": [[0.0], [0.25], [0.5]]
        }),
    );
    let out = run(&["weight", "classify", "--config", config.to_str().unwrap()]);
    let res = results(&out);
    assert_eq!(res["verdict"], json!("fails-(1)"), "{:?}", res["reasons"]);
    assert!(res["wiener_discrete_energy"].as_f64().unwrap() < 0.05);
    assert_eq!(code(&out), 10);
}

fn rotation_fixture() -> Value {
    json!({
        "system": {"kind": "explicit", "N": 2, "unitaries": [
            [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]
        ]},
        "x": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
        "weight": {"box": [255], "generator": {"kind": "trigpoly", "poly": {
            "dim": 1, "terms": [{"freq": [0.25], "coeff": [1.0, 0.0]}]}}},
        "ladder": [[3], [15], [63], [255]],
        "coeff_halfwidth": 2
    })
}

fn matrix_deviation(matrix: &Value, expect: &[[(f64, f64); 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in matrix.as_array().unwrap().iter().enumerate() {
        for (j, entry) in row.as_array().unwrap().iter().enumerate() {
            let re = entry[0].as_f64().unwrap();
            let im = entry[1].as_f64().unwrap();
            let (er, ei) = expect[i][j];
            worst = worst.max((re - er).hypot(im - ei));
        }
    }
    worst
}

#[test]
fn simulate_rotation_fixture_reproduces_the_element() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "sim.json", &rotation_fixture());
    let out = run(&["system", "simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let res = results(&out);
    let expect = [[(0.0, 0.0), (1.0, 0.0)], [(0.0, 0.0), (0.0, 0.0)]];
    for rung in res["averages"].as_array().unwrap() {
        let dev = matrix_deviation(&rung["matrix"], &expect);
        assert!(dev < 1e-12, "rung {:?}: deviation {dev}", rung["n"]);
    }
    assert_eq!(res["two_path"]["ok"], json!(true));
}

#[test]
fn simulate_identity_system_has_constant_averages() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "sim_id.json",
        &json!({
            "system": {"kind": "explicit", "N": 2, "unitaries": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
            ]},
            "x": [[[1.0, 0.0], [0.0, 0.5]], [[0.25, 0.0], [-0.75, 0.0]]],
            "ladder": [[2], [9], [30]]
        }),
    );
    let out = run(&["system", "simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    let expect = [[(1.0, 0.0), (0.0, 0.5)], [(0.25, 0.0), (-0.75, 0.0)]];
    for rung in res["averages"].as_array().unwrap() {
        let dev = matrix_deviation(&rung["matrix"], &expect);
        assert!(dev < 1e-13, "rung {:?}: deviation {dev}", rung["n"]);
    }
}

#[test]
fn simulate_random_system_needs_a_seed_and_passes_two_path() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "sim_rand.json",
        &json!({
            "system": {"kind": "random", "N": 3, "d": 2},
            "ladder": [[5, 4]],
            "coeff_halfwidth": 2
        }),
    );
    let missing = run(&["system", "simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&missing), 2);

    let out = run(&[
        "system",
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "11",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let res = results(&out);
    assert_eq!(res["two_path"]["ok"], json!(true));
    assert_eq!(report(&out)["payload"]["seed"], json!(11));
}

#[test]
fn vdc_check_identity_case_is_exact() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "vdc_id.json",
        &json!({"array": {"kind": "identity", "n": [4, 4], "N": 4}, "h": [1, 1]}),
    );
    let out = run(&["vdc", "check", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    assert_eq!(res["lhs"], json!(1.0));
    assert_eq!(res["rhs"], json!(9.0));
    assert_eq!(res["rhs_padded"], json!(6.25));
    assert_eq!(res["violation"], json!(false));
}

#[test]
fn vdc_check_zero_array_degenerates_to_equality() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "vdc_zero.json",
        &json!({"array": {"kind": "zero", "n": [3, 2], "N": 2}, "h": [2, 1]}),
    );
    let out = run(&["vdc", "check", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    assert_eq!(res["lhs"], json!(0.0));
    assert_eq!(res["rhs"], json!(0.0));
}

#[test]
fn vdc_check_flags_oversized_windows() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "vdc_big_h.json",
        &json!({"array": {"kind": "identity", "n": [3, 3], "N": 2}, "h": [5, 5]}),
    );
    let out = run(&["vdc", "check", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    assert_eq!(res["outside_hypothesis"], json!(true));
    assert_eq!(res["violation"], json!(false));
}

#[test]
fn vdc_fuzz_default_campaign_is_clean() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "fuzz.json", &json!({}));
    let missing = run(&["vdc", "fuzz", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&missing), 2);

    let out = run(&[
        "vdc",
        "fuzz",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    assert_eq!(res["trials"], json!(1000));
    assert_eq!(res["violations"], json!(0));
    assert_eq!(res["violation"], json!(false));
    assert!(res["windows_checked"].as_u64().unwrap() > 1000);
}

#[test]
fn ww_uniform_zero_stream_gives_zero() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "ww_zero.json",
        &json!({
            "channel": "classical",
            "source": {"kind": "zero"},
            "ladder": [[15, 15], [31, 31]],
            "grid": [8, 8]
        }),
    );
    let out = run(&["system", "ww-uniform", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    assert_eq!(res["final_sup"], json!(0.0));
}

#[test]
fn ww_uniform_reads_stream_files_and_requires_seed_for_iid() {
    use ergospec::ncsystem::{write_stream, SampleStream};
    use ergospec::MultiIndex;

    let dir = TempDir::new().unwrap();
    let n = MultiIndex::new(vec![63]).unwrap();
    let z = ergospec::TorusPoint::new(vec![0.25]).unwrap();
    let stream = SampleStream::from_fn(&n, |k| {
        z.pow(&MultiIndex::new(vec![k[0]]).unwrap())
    })
    .unwrap();
    let stream_path = dir.path().join("rotation.stream");
    write_stream(&stream_path, &stream).unwrap();

    let config = write_config(
        dir.path(),
        "ww_stream.json",
        &json!({
            "channel": "classical",
            "source": {"kind": "stream", "path": stream_path.to_str().unwrap()},
            "ladder": [[31], [63]],
            "grid": [8]
        }),
    );
    let out = run(&["system", "ww-uniform", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let res = results(&out);
    // A pure quarter rotation sits on the 8-grid, so the sup locks to 1 at
    // every rung that covers whole periods.
    assert!((res["final_sup"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(res["status"], json!("non-decaying"));

    let iid = write_config(
        dir.path(),
        "ww_iid.json",
        &json!({
            "channel": "classical",
            "source": {"kind": "iid_signs"},
            "ladder": [[31, 31], [63, 63]],
            "grid": [8, 8]
        }),
    );
    let missing = run(&["system", "ww-uniform", "--config", iid.to_str().unwrap()]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn ww_uniform_identity_element_is_expected_non_decay() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "ww_id.json",
        &json!({
            "channel": "matrix",
            "system": {"kind": "explicit", "N": 2, "unitaries": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
                [[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
            ]},
            "ladder": [[7, 7], [15, 15]],
            "grid": [4, 4]
        }),
    );
    let out = run(&["system", "ww-uniform", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    assert_eq!(res["status"], json!("expected-non-decay"));
    assert_eq!(res["expected_non_decay"], json!(true));
    for rung in res["rungs"].as_array().unwrap() {
        assert!((rung["sup"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn spectral_estimate_reports_rungs_and_masses() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "estimate.json",
        &json!({
            "weight": two_atom_weight(4096),
            "ladder": [[1024], [4096]],
            "points": [[0.3], [0.7]],
            "pointmass_halfwidth": 256,
            "table_halfwidth": 2
        }),
    );
    let out = run(&["spectral", "estimate", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    let rungs = res["rungs"].as_array().unwrap();
    assert_eq!(rungs.len(), 2);
    for rung in rungs {
        assert!((rung["mass"].as_f64().unwrap() - 1.0).abs() < 0.01);
        assert!(rung["hermitian_defect"].as_f64().unwrap() < 1e-12);
    }
    assert_eq!(res["top_coefficients"].as_array().unwrap().len(), 5);
    let masses: Vec<f64> = res["point_masses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["top_mass"].as_f64().unwrap())
        .collect();
    assert!((masses[0] - 0.64).abs() < 0.05);
    assert!((masses[1] - 0.36).abs() < 0.05);
}

#[test]
fn spectral_affinity_handles_both_modes() {
    let dir = TempDir::new().unwrap();
    let measures = write_config(
        dir.path(),
        "aff_measures.json",
        &json!({
            "mode": "measures",
            "p": {"atoms": [{"angles": [0.2], "mass": 0.5}, {"angles": [0.6], "mass": 0.5}]},
            "q": {"atoms": [{"angles": [0.2], "mass": 1.0}]}
        }),
    );
    let out = run(&["spectral", "affinity", "--config", measures.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rho = results(&out)["affinity"].as_f64().unwrap();
    assert!((rho - 0.5f64.sqrt()).abs() < 1e-9, "{rho}");

    let sequences = write_config(
        dir.path(),
        "aff_sequences.json",
        &json!({
            "mode": "sequences",
            "a": {"box": [2048], "generator": {"kind": "trigpoly", "poly": {
                "dim": 1, "terms": [{"freq": [0.3], "coeff": [1.0, 0.0]}]}}},
            "b": {"box": [2048], "generator": {"kind": "trigpoly", "poly": {
                "dim": 1, "terms": [{"freq": [0.71], "coeff": [1.0, 0.0]}]}}},
            "box": [2048]
        }),
    );
    let out = run(&["spectral", "affinity", "--config", sequences.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let res = results(&out);
    assert_eq!(res["violation"], json!(false));
    assert!(res["value"].as_f64().unwrap() < 0.01);
}

#[test]
fn reports_are_deterministic_up_to_the_header() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "fuzz_det.json",
        &json!({"trials": 20, "max_dim": 2, "max_n": [5, 5]}),
    );
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out_path in [&out_a, &out_b] {
        let out = run(&[
            "vdc",
            "fuzz",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let strip_clock = |text: String| -> String {
        text.lines()
            .filter(|line| !line.contains("generated_unix_seconds"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = std::fs::read_to_string(&out_a).unwrap();
    let b = std::fs::read_to_string(&out_b).unwrap();
    assert!(a.contains("generated_unix_seconds"));
    assert_eq!(strip_clock(a), strip_clock(b));
}
