use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mimo-pls"));
    cmd.env_remove("MIMO_PLS_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn csv_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

#[test]
fn fig1_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&[
            "fig1",
            "--trials",
            "50",
            "--m-grid",
            "2,8,32",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let rows = csv_rows(&a);
    assert_eq!(rows[0], "x,estimate,ci_low,ci_high,series");
    assert_eq!(rows.len(), 1 + 3 * 3);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(dir.path().join("a.manifest.json").exists());
}

#[test]
fn fig4_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let o = run(&[
        "fig4",
        "--trials",
        "1000",
        "--pfa",
        "0.05",
        "--m",
        "32",
        "--snr-grid-db=-4,6,16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1 + 3 * 3);
    for series in ["scheme1a", "scheme1b", "scheme2"] {
        assert_eq!(rows.iter().filter(|r| r.ends_with(&format!(",{series}"))).count(), 3);
    }
}

#[test]
fn manifest_alone_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = run(&[
        "detect",
        "--detector",
        "scheme2",
        "--trials",
        "500",
        "--calibration-trials",
        "2000",
        "--m",
        "64",
        "--seed",
        "21",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = dir.path().join("first.manifest.json");
    let second = dir.path().join("second.csv");
    let o = run(&[
        "detect",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["seed"], 21);
    assert_eq!(m["config"]["m"], 64);
    assert!(m["version"].as_str().unwrap().starts_with('v'));
    assert!(m["snr_definition"].as_str().unwrap().contains("n0"));

    let o = run(&[
        "fig1",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["fig4", "--m", "-3", "--out", "x.csv"],
        vec!["fig4", "--frobnicate", "--out", "x.csv"],
        vec!["fig4", "--trials", "many", "--out", "x.csv"],
        vec!["fig9", "--out", "x.csv"],
        vec!["fig1"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn invalid_values_exit_two_and_io_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["calibrate", "--pfa", "1.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let unwritable = dir.path().join("no/such/dir/x.csv");
    let o = run(&[
        "fig1",
        "--trials",
        "5",
        "--m-grid",
        "2",
        "--out",
        unwritable.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["fig2", "--trials", "20", "--m-grid", "4"])
        .env("MIMO_PLS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&dir.path().join("fig2.csv")).len(), 4);
}

#[test]
fn help_lists_overrides() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let help = String::from_utf8(o.stdout).unwrap();
    for flag in [
        "--trials",
        "--m ",
        "--n0",
        "--pfa",
        "--slots",
        "--ramp-start",
        "--threads",
        "MIMO_PLS_OUT_DIR",
    ] {
        assert!(help.contains(flag), "missing {flag}");
    }
}
