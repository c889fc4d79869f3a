use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_helical-oseen"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn summary(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is the JSON summary")
}

const OSEEN_ONLY: &str = "[grid]\nnx = 64\nnz = 8\nlx = 32.0\n[initial]\nkind = \"oseen-only\"\n[time]\nt_end = 0.0\n[output]\nsnapshot_every = 1\n";

#[test]
fn zero_end_time_writes_one_record() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", OSEEN_ONLY);
    let out = run(&["simulate", "--config", "c.toml", "--out", "run", "--quiet"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("run/diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("t,l2_v,"));
    assert!(dir.path().join("run/summary.json").exists());
    // the echoed configuration parses back to the same run
    let echo = std::fs::read_to_string(dir.path().join("run/config.toml")).unwrap();
    assert!(echo.contains("kind = \"oseen-only\""));
}

#[test]
fn decomposing_an_oseen_snapshot_recovers_unit_circulation() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", OSEEN_ONLY);
    assert!(run(&["simulate", "--config", "c.toml", "--out", "run", "--quiet"], dir.path()).status.success());
    let out = run(&["decompose", "run/snapshots/snap_00000.hlxf", "--m", "1.5", "--quiet"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out);
    assert!((s["a"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(s["h1_v"].as_f64().unwrap() < 1e-8);
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[grid]\nnx = 48\nnz = 16\nlx = 16.0\n[initial]\nsigma = 1.0\nseed = 7\n[time]\nt_end = 0.2\noutput_dt = 0.1\n";
    write(dir.path(), "c.toml", cfg);
    for d in ["a", "b"] {
        let out = run(&["simulate", "--config", "c.toml", "--out", d, "--quiet"], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a/diagnostics.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/diagnostics.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 4);
}

#[test]
fn passing_preset_exits_zero_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--preset", "lemma2", "--out", "v", "--quiet"], dir.path());
    assert!(out.status.success());
    let s = summary(&out);
    assert_eq!(s["passed"], true);
    assert_eq!(s["presets"][0]["criterion"], 10);
    assert!(dir.path().join("v/lemma2.csv").exists());
    assert!(dir.path().join("v/summary.json").exists());
}

#[test]
fn sweep_runs_both_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep-inequality", "--seed-count", "3", "--quiet"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out);
    assert_eq!(s["presets"].as_array().unwrap().len(), 2);
}

#[test]
fn rejected_inputs_exit_nonzero_with_reasons() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--preset", "nope"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));

    let out = run(&["rate-study", "--m", "0.9"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("m > 1"));

    write(dir.path(), "bad.toml", "[grid]\nnz = 33\nbogus = 1\n");
    let out = run(&["simulate", "--config", "bad.toml"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[grid] nz") && err.contains("[grid] bogus"), "{err}");
}
