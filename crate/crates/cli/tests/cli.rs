//! End-to-end tests against the built binary: happy paths, every reserved
//! exit code, artifact round trips, and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_modvar");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary should launch")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn base_config(dir: &Path, backend: &str) -> PathBuf {
    write(
        &dir.join("bell.circ"),
        "qubits 2\nH 0\nCNOT 0 1\n",
    );
    let config = dir.join("run.json");
    write(
        &config,
        &format!(
            r#"{{
  "grid": {{ "samples_per_period": 8, "period_count": 4 }},
  "envelope": {{ "family": "gaussian" }},
  "weight": {{ "family": "constant", "value": 1.0 }},
  "backend": "{backend}",
  "circuit": "bell.circ",
  "input": {{ "chi": 0.0, "phi": 0.0, "chi_b": 0.0, "phi_b": 0.0 }},
  "seed": 7
}}"#
        ),
    );
    config
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn exact_bell_run_writes_metrics_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = base_config(dir.path(), "exact");
    let out_dir = dir.path().join("out");
    let out = run(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let metrics = std::fs::read_to_string(out_dir.join("metrics.json")).unwrap();
    assert!(metrics.contains("\"backend\": \"exact\""));
    let entropy = field(&metrics, "marginal_entropy_bits");
    assert!((entropy - 1.0).abs() < 1e-10, "entropy {entropy}");
    let fidelity = field(&metrics, "decode_fidelity_vs_exact");
    assert!(fidelity >= 1.0 - 1e-10, "fidelity {fidelity}");
}

/// Pulls the first occurrence of a numeric field out of rendered JSON.
fn field(metrics: &str, key: &str) -> f64 {
    let tag = format!("\"{key}\": ");
    let start = metrics.find(&tag).expect(key) + tag.len();
    let rest = &metrics[start..];
    let end = rest.find([',', '\n']).unwrap();
    rest[..end].parse().expect(key)
}

#[test]
fn ancilla_bell_run_reports_four_live_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let config = base_config(dir.path(), "ancilla");
    let out_dir = dir.path().join("out");
    let out = run(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let metrics = std::fs::read_to_string(out_dir.join("metrics.json")).unwrap();
    let quarters = metrics
        .matches("\"probability\": 2.5000000000000")
        .count();
    assert_eq!(quarters, 4, "four branches at probability 1/4");
}

#[test]
fn identical_config_and_seed_give_byte_identical_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let config = base_config(dir.path(), "ancilla");
    let mut bytes = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let out = run(&[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "42",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_of(&out));
        bytes.push(std::fs::read(out_dir.join("metrics.json")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1], "metrics must be byte-identical");
}

#[test]
fn dump_state_round_trips_through_input_state() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("rot.circ"), "qubits 1\nRY(0.4) 0\n");
    let config = dir.path().join("dump.json");
    write(
        &config,
        r#"{
  "grid": { "samples_per_period": 8, "period_count": 4 },
  "envelope": { "family": "gaussian" },
  "weight": { "family": "constant", "value": 1.0 },
  "backend": "exact",
  "circuit": "rot.circ",
  "input": { "chi": 0.3, "phi": -0.9 }
}"#,
    );
    let out = run(&[
        "dump-state",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let dump = dir.path().join("state.json");
    assert!(dump.exists());

    // Feed the dump back in with no circuit: a pass-through run.
    let reload = dir.path().join("reload.json");
    write(
        &reload,
        r#"{
  "grid": { "samples_per_period": 8, "period_count": 4 },
  "envelope": { "family": "gaussian" },
  "weight": { "family": "constant", "value": 1.0 },
  "backend": "exact",
  "input_state": "state.json"
}"#,
    );
    let redump = dir.path().join("redump");
    let out = run(&[
        "dump-state",
        "--config",
        reload.to_str().unwrap(),
        "--out",
        redump.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let first = std::fs::read(&dump).unwrap();
    let second = std::fs::read(redump.join("state.json")).unwrap();
    assert_eq!(first, second, "pass-through must preserve the dump exactly");
}

#[test]
fn malformed_circuit_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let config = base_config(dir.path(), "exact");
    write(&dir.path().join("bell.circ"), "qubits 2\nCXOT 0 1\n");
    let out = run(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("line 2, column 1"), "{err}");
    assert!(err.contains("unknown gate 'CXOT'"), "{err}");
}

#[test]
fn invalid_grid_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("odd.json");
    write(
        &config,
        r#"{
  "grid": { "samples_per_period": 7, "period_count": 4 },
  "envelope": { "family": "uniform" },
  "weight": { "family": "cos_theta" },
  "backend": "exact"
}"#,
    );
    let out = run(&["grid-info", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("even"), "{}", stderr_of(&out));
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("unknown.json");
    write(
        &config,
        r#"{
  "grid": { "samples_per_period": 8, "period_count": 4 },
  "envelope": { "family": "uniform" },
  "weight": { "family": "cos_theta" },
  "backend": "exact",
  "mystery": 1
}"#,
    );
    let out = run(&["grid-info", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("mystery"), "{}", stderr_of(&out));
}

#[test]
fn mismatched_grid_reload_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = base_config(dir.path(), "exact");
    let out = run(&[
        "dump-state",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let reload = dir.path().join("reload.json");
    write(
        &reload,
        r#"{
  "grid": { "samples_per_period": 16, "period_count": 4 },
  "envelope": { "family": "gaussian" },
  "weight": { "family": "constant", "value": 1.0 },
  "backend": "exact",
  "input_state": "state.json"
}"#,
    );
    let out = run(&["run", "--config", reload.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("grid"), "{}", stderr_of(&out));
}

#[test]
fn failed_self_check_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("bell.circ"), "qubits 2\nH 0\nCNOT 0 1\n");
    let config = dir.path().join("negtol.json");
    write(
        &config,
        r#"{
  "grid": { "samples_per_period": 8, "period_count": 4 },
  "envelope": { "family": "gaussian" },
  "weight": { "family": "constant", "value": 1.0 },
  "backend": "exact",
  "circuit": "bell.circ",
  "self_check_tolerance": -1.0
}"#,
    );
    let out = run(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        stderr_of(&out).contains("invariant violation"),
        "{}",
        stderr_of(&out)
    );
}

#[test]
fn unwritable_output_directory_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let config = base_config(dir.path(), "exact");
    let blocker = dir.path().join("occupied");
    write(&blocker, "not a directory");
    let out = run(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_verify_suite_exits_two() {
    let out = run(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("unknown suite"), "{}", stderr_of(&out));
}

#[test]
fn verify_all_passes_and_prints_every_check() {
    let out = run(&["verify", "--suite", "all", "--seed", "11"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    for suite in ["zak:", "povm:", "circuit11:", "circuit13:", "backends:"] {
        assert!(text.contains(suite), "missing {suite} in:\n{text}");
    }
    assert!(text.contains("result: PASS"));
    assert!(!text.contains("FAIL]"));
}

#[test]
fn grid_info_prints_sorted_full_precision_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = base_config(dir.path(), "exact");
    let out = run(&["grid-info", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(text.contains("\"dim\": 32"));
    assert!(text.contains("\"dtheta\": 7.8539816339744828e-1"));
    let dim_pos = text.find("\"dim\"").unwrap();
    let dtheta_pos = text.find("\"dtheta\"").unwrap();
    let samples_pos = text.find("\"samples_per_period\"").unwrap();
    assert!(dim_pos < dtheta_pos && dtheta_pos < samples_pos, "keys sorted");
}

#[test]
fn sweep_writes_a_monotone_csv_ladder() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("rx.circ"), "qubits 1\nRX(0.7853981633974483) 0\n");
    let config = dir.path().join("sweep.json");
    write(
        &config,
        r#"{
  "grid": { "samples_per_period": 32, "period_count": 4 },
  "envelope": { "family": "gaussian", "theta_center": 0.3141592653589793, "k_center": 0.5, "k_width": 0.125 },
  "weight": { "family": "cos_theta" },
  "backend": "ancilla",
  "circuit": "rx.circ",
  "input": { "chi": 0.0, "phi": 0.0 },
  "sweep": { "theta_widths": [0.7853981633974483, 0.39269908169872414, 0.19634954084936207] }
}"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta_width,probability,cv_overlap,decode_fidelity,total_probability"
    );
    let overlaps: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(overlaps.len(), 3);
    assert!(
        overlaps.windows(2).all(|w| w[1] > w[0]),
        "narrower envelopes must fix the gate better: {overlaps:?}"
    );
}
