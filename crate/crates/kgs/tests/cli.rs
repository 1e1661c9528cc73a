//! End-to-end tests of the command-line interface: exit codes, error
//! reporting, and artifact layout.

use std::path::Path;
use std::process::{Command, Output};

fn kgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgs"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn malformed_config_exits_2_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    let out = kgs(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["exit_code"], 2);
    assert!(err["error"].is_string());
}

#[test]
fn short_sweep_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 16, "cutoffs": [4.0]}"#).unwrap();
    let out = kgs(&[
        "smoothing-study",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_abort_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    // Overflow-scale data make the nonlinear products non-finite.
    std::fs::write(
        &cfg,
        r#"{"n": 8, "horizon": 0.01, "step": 1e-3, "amplitude": 1e200}"#,
    )
    .unwrap();
    let out = kgs(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["exit_code"], 3);
}

#[test]
fn zero_threads_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = kgs(&[
        "norms",
        "--out",
        dir.path().join("out").to_str().unwrap(),
        "--threads",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_override_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 8, "samples": 8}"#).unwrap();
    let run = |out: &Path, seed: &str| {
        let st = kgs(&[
            "norms",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(st.status.code(), Some(0));
        std::fs::read(out.join("norms.csv")).unwrap()
    };
    let a = run(&dir.path().join("a"), "1");
    let b = run(&dir.path().join("b"), "2");
    let a2 = run(&dir.path().join("a2"), "1");
    assert_ne!(a, b);
    assert_eq!(a, a2);
}

#[test]
fn simulate_emits_manifest_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 8, "horizon": 0.01, "step": 1e-3}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = kgs(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    // Every emitted file is referenced; no orphans besides the manifest.
    let listed: Vec<String> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name != "manifest.json" {
            assert!(listed.contains(&name), "orphan artifact {name}");
        }
    }
    // Defaults are materialized into the manifest.
    assert_eq!(manifest["config"]["dim"], 3);
    assert_eq!(manifest["config"]["coupling"], true);
    assert!(manifest["timestamps"]["finished"].as_f64().unwrap() > 0.0);
    // The final snapshot reads back.
    let (psi, sidecar) = kgs::snapshot::read_snapshot(&out_dir.join("psi_final.kgsf")).unwrap();
    assert_eq!(psi.grid().n(), 8);
    assert_eq!(sidecar.role, "psi_final");
}
