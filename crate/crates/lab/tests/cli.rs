use std::path::Path;
use std::process::{Command, Output};

use loopspace_lab::{preset, Experiment};

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopspace-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("LOOPSPACE_THREADS")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, exp: Experiment, edit: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v = preset(exp, true).to_json();
    v["output_dir"] = dir.join("out").to_string_lossy().into();
    edit(&mut v);
    let path = dir.join("config.json");
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_all_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), Experiment::Mollifier, |_| {});
    let out = lab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["results.csv", "report.json", "plot.gp"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn assertion_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), Experiment::HomotopyPc, |v| {
        v["tolerances"] = serde_json::json!({"final_distance": 1e-6});
    });
    let out = lab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL final distance") && stdout.contains("rows [7]"), "{stdout}");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), Experiment::Norms, |v| {
        v["colour"] = "blue".into();
    });
    let out = lab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    assert_eq!(lab(&["run", "does-not-exist.json"], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"], dir.path()).status.code(), Some(2));

    let cfg = write_config(dir.path(), Experiment::Norms, |_| {});
    assert_eq!(lab(&["run", &cfg], dir.path()).status.code(), Some(0));
    let csv = dir.path().join("out/results.csv");
    let csv = csv.to_str().unwrap();
    let missing = lab(&["emit-plots", csv, "--x", "cutoff", "--y", "norm_sq_s9"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("norm_sq_s9"));
    assert_eq!(lab(&["emit-plots", csv, "--x", "cutoff"], dir.path()).status.code(), Some(2));
    let ok = lab(&["emit-plots", csv, "--x", "cutoff", "--y", "norm_sq_s0.25,norm_sq_s0.75"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert!(dir.path().join("out/results.gp").exists());
}

#[test]
fn thread_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), Experiment::Mollifier, |_| {});
    let with = |n: &str| {
        Command::new(env!("CARGO_BIN_EXE_loopspace-lab"))
            .args(["run", &cfg])
            .env("LOOPSPACE_THREADS", n)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(with("1"), Some(0));
    assert_eq!(with("0"), Some(2));
    assert_eq!(with("many"), Some(2));
}

#[test]
fn quick_check_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["check-all", "--quick", "--output", "runs"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 9);
    for exp in Experiment::ALL {
        assert!(dir.path().join("runs").join(exp.name()).join("report.json").exists());
    }
}
