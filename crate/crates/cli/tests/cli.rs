//! End-to-end tests of the `fringeprobe` binary: artifact sets, exit codes,
//! and byte-level determinism of everything it writes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_fringeprobe")
}

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper.config")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary must launch")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|err| panic!("reading {}: {err}", path.display()))
}

fn simulate_into(dir: &Path, seed: &str, extra: &[&str]) -> Output {
    let config = config_path();
    let mut args = vec![
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--points",
        "120",
        "--seed",
        seed,
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn simulate_writes_byte_identical_outputs_on_rerun() {
    let tmp = tempfile::tempdir().unwrap();
    let d1 = tmp.path().join("first");
    let d2 = tmp.path().join("second");
    let out1 = simulate_into(&d1, "7", &[]);
    let out2 = simulate_into(&d2, "7", &[]);
    assert!(out1.status.success(), "stderr: {}", String::from_utf8_lossy(&out1.stderr));
    assert!(out2.status.success());
    assert_eq!(read(&d1.join("scan_both.csv")), read(&d2.join("scan_both.csv")));
    assert_eq!(read(&d1.join("scan_both.svg")), read(&d2.join("scan_both.svg")));
}

#[test]
fn simulate_names_outputs_by_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let out = simulate_into(tmp.path(), "0", &["--mode", "one-beam-blocked"]);
    assert!(out.status.success());
    assert!(tmp.path().join("scan_single.csv").is_file());
    assert!(tmp.path().join("scan_single.svg").is_file());
    assert!(!tmp.path().join("scan_both.csv").exists());
}

#[test]
fn missing_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--config",
        "/nonexistent/rig.config",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read config"));
}

#[test]
fn invalid_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.config");
    let text = std::fs::read_to_string(config_path())
        .unwrap()
        .replace("wire_thickness", "# wire_thickness");
    std::fs::write(&bad, format!("{text}\nwire_thickness = 300 um\n")).unwrap();
    let out = run(&[
        "simulate",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wire_thickness"));
}

#[test]
fn unwritable_out_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("blocker");
    std::fs::write(&blocker, "not a directory").unwrap();
    let out = simulate_into(&blocker.join("sub"), "0", &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot create output directory"));
}

#[test]
fn svg_model_curve_is_seed_invariant_and_unique() {
    let tmp = tempfile::tempdir().unwrap();
    let d1 = tmp.path().join("seed1");
    let d2 = tmp.path().join("seed2");
    assert!(simulate_into(&d1, "1", &[]).status.success());
    assert!(simulate_into(&d2, "2", &[]).status.success());
    let svg1 = String::from_utf8(read(&d1.join("scan_both.svg"))).unwrap();
    let svg2 = String::from_utf8(read(&d2.join("scan_both.svg"))).unwrap();
    assert_eq!(svg1.matches("<polyline").count(), 1);
    assert_eq!(svg2.matches("<polyline").count(), 1);
    let polyline = |svg: &str| {
        let start = svg.find("<polyline").unwrap();
        let end = svg[start..].find("/>").unwrap() + start;
        svg[start..end].to_string()
    };
    assert_eq!(polyline(&svg1), polyline(&svg2), "model curve must not depend on the seed");
    assert_ne!(svg1, svg2, "data markers must depend on the seed");
}

#[test]
fn fit_recovers_the_simulated_scan() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = simulate_into(tmp.path(), "3", &[]);
    assert!(sim.status.success(), "stderr: {}", String::from_utf8_lossy(&sim.stderr));
    let out = run(&[
        "fit",
        "--config",
        config_path().to_str().unwrap(),
        "--scan",
        tmp.path().join("scan_both.csv").to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let fit: serde_json::Value =
        serde_json::from_slice(&read(&tmp.path().join("fit.json"))).unwrap();
    assert_eq!(fit["converged"], serde_json::Value::Bool(true));
    let y0 = fit["y0"].as_f64().unwrap();
    assert!((y0 - 0.574).abs() / 0.574 < 0.05, "fitted centre {y0} mm");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("fitted pattern centre"));
}

#[test]
fn fit_rejects_a_malformed_scan_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let scan = tmp.path().join("broken.csv");
    std::fs::write(&scan, "position_mm,f,f_err\n0.1,0.9\n").unwrap();
    let out = run(&[
        "fit",
        "--config",
        config_path().to_str().unwrap(),
        "--scan",
        scan.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_refuses_an_envelope_only_scan_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(
        simulate_into(tmp.path(), "0", &["--mode", "one-beam-blocked"]).status.success()
    );
    let out = run(&[
        "fit",
        "--config",
        config_path().to_str().unwrap(),
        "--scan",
        tmp.path().join("scan_single.csv").to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate fit"));
}

#[test]
fn analyze_prints_json_with_the_momentum_figures() {
    let out = run(&[
        "analyze",
        "--config",
        config_path().to_str().unwrap(),
        "--format",
        "json",
        "--points",
        "20",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["momentum"]["nominal_wire_momentum_spread"].as_f64(), Some(6.4));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("6.258665"));
}

#[test]
fn momentum_writes_its_audit_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "momentum",
        "--config",
        config_path().to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let audit: serde_json::Value =
        serde_json::from_slice(&read(&tmp.path().join("momentum.json"))).unwrap();
    let split = audit["beam_momentum_split"].as_f64().unwrap();
    assert!((split - std::f64::consts::TAU).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stdout).contains("interpretation"));
}

#[test]
fn report_writes_the_full_deterministic_artifact_set() {
    let tmp = tempfile::tempdir().unwrap();
    let config = config_path();
    let run_report = |dir: &Path| {
        run(&[
            "report",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
            "--points",
            "150",
            "--seed",
            "5",
        ])
    };
    let d1 = tmp.path().join("first");
    let d2 = tmp.path().join("second");
    let out = run_report(&d1);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(run_report(&d2).status.success());

    let manifest: serde_json::Value =
        serde_json::from_slice(&read(&d1.join("manifest.json"))).unwrap();
    let listed: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        listed,
        vec![
            "scan_both.csv",
            "scan_both.svg",
            "scan_single.csv",
            "scan_single.svg",
            "fit.json",
            "report.json",
            "momentum.json",
            "summary.txt",
        ]
    );
    for name in &listed {
        assert!(d1.join(name).is_file(), "missing artifact {name}");
        assert_eq!(read(&d1.join(name)), read(&d2.join(name)), "{name} must be deterministic");
    }
    assert_eq!(read(&d1.join("manifest.json")), read(&d2.join("manifest.json")));

    let summary = String::from_utf8(read(&d1.join("summary.txt"))).unwrap();
    assert!(summary.contains("fitted pattern centre"));
    assert!(summary.contains("mean which-way knowledge"));
}
