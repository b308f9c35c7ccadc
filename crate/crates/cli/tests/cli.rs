//! End-to-end tests of the `qae` binary: output contracts, exit codes,
//! and artifact determinism.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_qae");

fn qae(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("QAE_OUT_ROOT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Extracts the number following `name = ` on its own stdout line.
fn field(out: &str, name: &str) -> f64 {
    let prefix = format!("{name} = ");
    out.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("missing `{name}` in:\n{out}"))
        .trim()
        .parse()
        .expect("numeric field")
}

#[test]
fn bounds_prints_the_gaussian_tail() {
    let a = 0.070_710_678_118_654_75_f64;
    let out = qae(&[
        "bounds",
        "--a",
        &a.to_string(),
        "--t-max",
        "20",
        "--eps",
        "1e-3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let expect = (2.0 / a) * (-a * a * 400.0).exp();
    assert!((field(&text, "gaussian_bound") - expect).abs() < 1e-12);
    let min_t = field(&text, "min_t for eps 0.001");
    let bound = |t: f64| (2.0 / a) * (-a * a * t * t).exp();
    assert!(bound(min_t) <= 1e-3, "min_t fails its own bound");
    assert!(bound(min_t - 1.0) > 1e-3, "min_t is not minimal");
}

#[test]
fn estimate_recovers_a_planted_angle() {
    let out = qae(&["estimate", "--theta", "0.6", "--m-schedule", "1,2,4,8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((field(&text, "theta_hat") - 0.6).abs() < 1e-4);
    assert!((field(&text, "amplitude") - 0.6_f64.cos().powi(2)).abs() < 1e-4);

    let json = qae(&[
        "estimate",
        "--theta",
        "0.6",
        "--m-schedule",
        "1,2,4,8",
        "--json",
    ]);
    assert!(json.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).expect("valid json");
    assert_eq!(v["magnification"], 8);
    assert_eq!(v["rungs"].as_array().expect("rung list").len(), 4);
    assert!((v["theta_hat"].as_f64().unwrap() - 0.6).abs() < 1e-4);
}

#[test]
fn usage_errors_exit_2() {
    let unknown = qae(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));

    let conflict = qae(&[
        "estimate",
        "--theta",
        "0.6",
        "--psi-seed",
        "1",
        "--phi-seed",
        "2",
    ]);
    assert_eq!(conflict.status.code(), Some(2));

    let bad_figure = qae(&["reproduce", "fig99"]);
    assert_eq!(bad_figure.status.code(), Some(2));
}

#[test]
fn config_validation_errors_exit_2() {
    let out = qae(&["reproduce", "fig7", "--shots", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("invalid configuration"));

    let degenerate = qae(&["estimate", "--theta", "0.0"]);
    assert_eq!(degenerate.status.code(), Some(2));
}

#[test]
fn pipeline_errors_exit_1() {
    let missing = qae(&["observable", "--spec", "/nonexistent/obs.txt"]);
    assert_eq!(missing.status.code(), Some(1));

    // A real-valued probability series cannot separate an angle from its
    // complement, so a probability-mode estimate fails the unwrap.
    let dir = tempfile::tempdir().expect("tempdir");
    let spec = dir.path().join("obs.txt");
    fs::write(&spec, "1 ZI\n").expect("write spec");
    let ambiguous = qae(&[
        "observable",
        "--spec",
        spec.to_str().unwrap(),
        "--probe-theta",
        "0.595",
        "--mode",
        "probability",
    ]);
    assert_eq!(ambiguous.status.code(), Some(1));
    assert!(stderr(&ambiguous).contains("ambiguous"));
}

#[test]
fn observable_probe_route_matches_closed_form() {
    let dir = tempfile::tempdir().expect("tempdir");
    let spec = dir.path().join("obs.txt");
    fs::write(&spec, "# test observable\n0.5 ZI\n0.25 IZ\n0.75 II\n").expect("write spec");
    let out = qae(&[
        "observable",
        "--spec",
        spec.to_str().unwrap(),
        "--probe-theta",
        "0.595",
        "--json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    // Probe state: Ry(0.595) qubit 0, |0> qubit 1, so <ZI> = cos(0.595),
    // <IZ> = 1, and the identity term contributes its coefficient.
    let expect = 0.5 * 0.595_f64.cos() + 0.25 + 0.75;
    assert!((v["value"].as_f64().unwrap() - expect).abs() < 1e-4);
    assert_eq!(v["sign_ambiguous"], true);
    let routes: Vec<&str> = v["terms"]
        .as_array()
        .expect("terms")
        .iter()
        .map(|t| t["estimate"]["route"].as_str().expect("route"))
        .collect();
    assert_eq!(routes, ["spectral_ladder", "degenerate_exact", "identity"]);
}

/// Relative path -> content for every artifact except the manifest
/// (whose timestamp differs between runs).
fn artifact_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut map = BTreeMap::new();
    for entry in fs::read_dir(root).expect("run dir") {
        let path = entry.expect("dir entry").path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if name == "manifest.json" {
            continue;
        }
        map.insert(name, fs::read(&path).expect("artifact readable"));
    }
    map
}

fn manifest_hashes(root: &Path) -> BTreeMap<String, String> {
    let text = fs::read_to_string(root.join("manifest.json")).expect("manifest");
    let v: serde_json::Value = serde_json::from_str(&text).expect("manifest json");
    v["artifacts"]
        .as_array()
        .expect("artifact list")
        .iter()
        .map(|e| {
            (
                e["path"].as_str().unwrap().to_string(),
                e["sha256"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

#[test]
fn reproduce_writes_identical_artifacts_across_runs() {
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = qae(&["reproduce", "fig6", "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        out_dir
    };
    let first = run("first");
    let second = run("second");

    let bytes_a = artifact_bytes(&first);
    let bytes_b = artifact_bytes(&second);
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b, "artifact bytes differ between runs");
    assert_eq!(manifest_hashes(&first), manifest_hashes(&second));

    // The manifest inventories exactly the non-manifest files on disk.
    let inventory = manifest_hashes(&first);
    assert_eq!(
        inventory.keys().collect::<Vec<_>>(),
        bytes_a.keys().collect::<Vec<_>>(),
        "manifest inventory does not match the run directory"
    );
}

#[test]
fn reproduce_honors_config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, "{\"t_max\": 30, \"grid_step\": 0.01}").expect("write config");
    let out_dir = dir.path().join("run");
    let out = qae(&[
        "reproduce",
        "fig3",
        "--config",
        cfg_path.to_str().unwrap(),
        "--grid-step",
        "0.002",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = fs::read_to_string(out_dir.join("manifest.json")).expect("manifest");
    let v: serde_json::Value = serde_json::from_str(&text).expect("manifest json");
    // File overrides the default; the flag overrides the file.
    assert_eq!(v["config"]["t_max"], 30);
    assert_eq!(v["config"]["grid_step"].as_f64().unwrap(), 0.002);
    assert_eq!(v["experiment"], "fig3_amplitude_sweep");

    let bad_path = dir.path().join("bad.json");
    fs::write(&bad_path, "{\"no_such_field\": 1}").expect("write config");
    let rejected = qae(&["reproduce", "fig3", "--config", bad_path.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(2));
}

#[test]
fn validate_reports_all_checks_passing() {
    let out = qae(&["validate"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("all 4 checks passed"), "stdout: {text}");
    assert!(!text.contains("FAILED"));
}
