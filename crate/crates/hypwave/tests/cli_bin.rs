//! Black-box tests of the command-line binary: exit codes, output schema,
//! and byte-level reproducibility.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypwave"))
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

const SMALL_RUN: &str = "\
equation = wm2d
lambda = 0.3
grid.r_max = 10
grid.n = 400
control.t_end = 1.0
control.output_stride = 20
initial_data.amplitude = 0.02
initial_data.r0 = 2.0
initial_data.sigma = 0.6
";

#[test]
fn simulate_writes_schema_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    write(&cfg, SMALL_RUN);
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let csv = fs::read_to_string(out1.join("timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,total_energy,linear_energy_4d,interior_residual,s_norm_acc,morawetz_acc"
    );
    let first = lines.next().unwrap();
    assert_eq!(first.split(',').count(), 6);
    // 17 significant digits per field
    assert!(first.split(',').all(|f| f.contains('e') && f.len() >= 19), "{first}");
    assert_eq!(
        fs::read(out1.join("timeseries.csv")).unwrap(),
        fs::read(out2.join("timeseries.csv")).unwrap(),
        "identical configs must produce identical bytes"
    );
    assert!(out1.join("checkpoint_0.000000.txt").exists());
    assert!(out1.join("checkpoint_1.000000.txt").exists());
    assert!(out1.join("meta.txt").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    write(&cfg, "equation = wm2d\nbogus = 1\n");
    let out = bin().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 2"), "diagnostic must carry the position: {msg}");

    // missing file is a usage error too
    let out = bin().args(["simulate", "--config", "/nonexistent.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn blow_up_exits_3_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sphere.cfg");
    write(
        &cfg,
        "equation = wm2d\ntarget = sphere\nlambda = 0\ngrid.r_max = 8\ngrid.n = 1000\n\
         control.t_end = 4.0\ncontrol.output_stride = 10\ninitial_data.amplitude = 0.5\n\
         initial_data.r0 = 2.0\ninitial_data.sigma = 0.8\ninitial_data.travel = in\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    let meta = fs::read_to_string(out.join("meta.txt")).unwrap();
    assert!(meta.contains("status = blow-up"));
    assert!(meta.contains("failure_time"));

    // the same data runs the bubbling diagnostics to completion
    let bdir = dir.path().join("bub");
    let status = bin()
        .args(["bubbling", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&bdir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    let report = fs::read_to_string(bdir.join("bubbling.txt")).unwrap();
    assert!(report.contains("verdict = blow-up"));
    assert!(report.contains("bubble_distance"));
}

#[test]
fn bubbling_rejects_hyperbolic_target() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    write(&cfg, SMALL_RUN);
    let out = bin().args(["bubbling", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_morawetz_exit_codes() {
    let ok = bin()
        .args(["verify_morawetz", "--lambda", "0.5", "--resolution", "120"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("key") && stdout.contains("PASS"), "{stdout}");

    let fail = bin()
        .args(["verify_morawetz", "--lambda", "0.75", "--resolution", "120"])
        .status()
        .unwrap();
    assert_eq!(fail.code(), Some(1));

    let expected = bin()
        .args(["verify_morawetz", "--lambda", "0.75", "--expect-fail", "--resolution", "120"])
        .status()
        .unwrap();
    assert_eq!(expected.code(), Some(0));
}

#[test]
fn lambda_critical_tol_validation_and_success() {
    let bad = bin().args(["lambda_critical", "--tol", "0.5"]).status().unwrap();
    assert_eq!(bad.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let ok = bin()
        .args(["lambda_critical", "--tol", "1e-5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let report = fs::read_to_string(dir.path().join("morawetz_certificate.txt")).unwrap();
    assert!(report.contains("critical endpoint enclosure"));
    assert!(report.contains("c_lambda table"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
