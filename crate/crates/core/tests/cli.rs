use std::fs;
use std::path::Path;

use serde_json::Value;
use symlab::cli::run;

fn call(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["symlab".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(out.display().to_string());
    run(argv)
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(run(["symlab", "--help"]), 0);
    assert_eq!(run(["symlab", "--version"]), 0);
    assert_eq!(run(["symlab", "shoot", "--help"]), 0);
}

#[test]
fn malformed_arguments_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(["symlab", "no-such-command"]), 1);
    assert_eq!(call(dir.path(), &["shoot", "--h", "abc"]), 1);
    assert_eq!(call(dir.path(), &["shoot", "--bracket", "1"]), 1);
    assert_eq!(call(dir.path(), &["shoot", "--g", "power:0.5"]), 1);
}

#[test]
fn unknown_preset_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(call(dir.path(), &["example1", "--preset", "nope"]), 1);
}

#[test]
fn class_check_single_growth_function() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        call(dir.path(), &["ag-check", "--g", "power:2", "--phi", "power:1,1"]),
        0
    );
    let s = summary(dir.path());
    assert_eq!(s["result"]["status"], "member");
    assert_eq!(s["command"], "ag-check");
    assert_eq!(s["version"], symlab::VERSION);
    assert!(dir.path().join("data/ag_partial_integrals.csv").exists());
}

#[test]
fn class_check_table_mode() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(call(dir.path(), &["ag-check"]), 0);
    let s = summary(dir.path());
    assert_eq!(s["result"]["agree"], 12);
    assert_eq!(s["result"]["total"], 12);
}

#[test]
fn example_case_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        call(
            dir.path(),
            &["example1", "--p", "3", "--s", "4", "--h", "0.02", "--probes", "10"]
        ),
        0
    );
    let s = summary(dir.path());
    assert_eq!(s["result"]["case"], "iii");
    assert_eq!(s["config"]["h"], 0.02);
    assert!(s["result"]["halving_ratio"].as_f64().unwrap() >= 2.0);
    for name in ["bump_profile", "collar_profile", "residuals"] {
        assert!(dir.path().join(format!("data/{name}.csv")).exists(), "{name}");
    }
}

#[test]
fn pohozaev_torsion_preset() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        call(dir.path(), &["pohozaev", "--preset", "torsion", "--h", "0.0078125"]),
        0
    );
    let s = summary(dir.path());
    let lhs = s["result"]["lhs"].as_f64().unwrap();
    let rhs = s["result"]["rhs"].as_f64().unwrap();
    let target = -std::f64::consts::FRAC_PI_4;
    assert!((lhs - target).abs() < 0.01 * target.abs() && (rhs - target).abs() < 0.01 * target.abs());
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["detect", "--h", "0.1"];
    assert_eq!(call(dir.path(), &args), 0);
    let first = (
        fs::read(dir.path().join("summary.json")).unwrap(),
        fs::read(dir.path().join("data/regions.csv")).unwrap(),
    );
    assert_eq!(call(dir.path(), &args), 0);
    let second = (
        fs::read(dir.path().join("summary.json")).unwrap(),
        fs::read(dir.path().join("data/regions.csv")).unwrap(),
    );
    assert_eq!(first, second);
}

#[test]
fn worker_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(
        call(a.path(), &["minimize", "--h", "0.2", "--steps", "20", "--workers", "1"]),
        0
    );
    assert_eq!(
        call(b.path(), &["minimize", "--h", "0.2", "--steps", "20", "--workers", "3"]),
        0
    );
    assert_eq!(summary(a.path())["result"], summary(b.path())["result"]);
    assert_eq!(
        fs::read(a.path().join("data/trace.csv")).unwrap(),
        fs::read(b.path().join("data/trace.csv")).unwrap()
    );
}

#[test]
fn config_file_sits_between_preset_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"preset": "torsion", "radius": 2.0, "tol": 1e-9, "g": {"kind": "power", "p": 2.0}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        call(&out, &["shoot", "--config", cfg.to_str().unwrap(), "--tol", "1e-10"]),
        0
    );
    let s = summary(&out);
    assert_eq!(s["config"]["radius"], 2.0);
    assert_eq!(s["config"]["tol"], 1e-10);
    assert_eq!(s["config"]["preset"], "torsion");
    // U(0) = R²/(2N)
    let c = s["result"]["center_value"].as_f64().unwrap();
    assert!((c - 1.0).abs() < 1e-8, "{c}");
    assert!(out.join("data/profile.csv").exists());
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"radius": 1.0, "colour": "red"}"#).unwrap();
    assert_eq!(
        call(&dir.path().join("out"), &["shoot", "--config", cfg.to_str().unwrap()]),
        1
    );
}

#[test]
fn numerical_failure_exits_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    // the bracket holds no sign change of the boundary miss
    assert_eq!(
        call(dir.path(), &["shoot", "--preset", "torsion", "--bracket", "0.5,1"]),
        2
    );
    let s = summary(dir.path());
    assert_eq!(s["error"]["kind"], "no_sign_change");
    assert!(s.get("result").is_none());
}

#[test]
fn second_variation_reports_negative_direction() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(call(dir.path(), &["second-variation"]), 0);
    let s = summary(dir.path());
    assert_eq!(s["result"]["found"], true);
    assert!(s["result"]["q_star"].as_f64().unwrap() < 0.0);
}

#[test]
fn torsion_second_variation_finds_nothing() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(call(dir.path(), &["second-variation", "--preset", "torsion"]), 0);
    assert_eq!(summary(dir.path())["result"]["found"], false);
}

#[test]
fn remaining_commands_run_on_defaults() {
    for args in [vec!["cond-abc", "--condition", "A"], vec!["rescale"], vec!["shoot"]] {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(call(dir.path(), &args), 0, "{args:?}");
        assert!(summary(dir.path()).get("result").is_some());
    }
}
