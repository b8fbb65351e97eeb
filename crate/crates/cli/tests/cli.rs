use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(dir: &tempfile::TempDir, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_kronsum")).args(args).current_dir(dir.path()).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

const D12: &str = r#"{"n":2,"entries":[[1,0],[0,2]]}"#;

#[test]
fn check_of_a_matrix_with_itself() {
    let d = dir();
    write(&d, "a.json", r#"{"n":2,"entries":[[1,2],[3,4]]}"#);
    let r = run(&d, &["check", "a.json", "a.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["command"]["name"], "check");
    assert_eq!(doc["result"]["verdict"], "commuting");
    assert_eq!(doc["result"]["residual"].as_f64(), Some(0.0));
    assert!(r.stderr.starts_with("check: commuting"));
}

#[test]
fn usage_errors_exit_with_two() {
    let d = dir();
    write(&d, "d.json", D12);
    assert_eq!(run(&d, &[]).code, 2);
    assert_eq!(run(&d, &["frobnicate"]).code, 2);
    assert_eq!(run(&d, &["check", "d.json"]).code, 2);
    assert_eq!(run(&d, &["basis", "d.json", "--mode", "sideways"]).code, 2);
    assert_eq!(run(&d, &["basis", "d.json", "--tol", "-1"]).code, 2);
    assert_eq!(run(&d, &["funccheck", "d.json", "d.json", "--f", "sin"]).code, 2);
    let r = run(&d, &["basis", "missing.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("missing.json"), "{}", r.stderr);
}

#[test]
fn help_goes_to_stdout() {
    let r = run(&dir(), &["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("set-check"));
}

#[test]
fn malformed_files_name_the_problem() {
    let d = dir();
    write(&d, "syntax.json", "{\"n\": 2,\n \"entries\": [[1, 2], [3, 4]\n");
    let r = run(&d, &["basis", "syntax.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);

    write(&d, "ragged.json", r#"{"n":2,"entries":[[1,2],[3]]}"#);
    let r = run(&d, &["basis", "ragged.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("row 2"), "{}", r.stderr);

    write(&d, "wide.json", r#"{"n":2,"entries":[[1,2,3],[4,5,6]]}"#);
    let r = run(&d, &["basis", "wide.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("2 rows of 3"), "{}", r.stderr);
}

#[test]
fn mismatched_orders_are_usage_errors() {
    let d = dir();
    write(&d, "d.json", D12);
    write(&d, "one.json", r#"{"n":1,"entries":[[5]]}"#);
    let r = run(&d, &["check", "d.json", "one.json"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn numerical_failures_exit_with_three() {
    let d = dir();
    write(&d, "d.json", D12);
    write(&d, "sing.json", r#"{"n":2,"entries":[[1,2],[2,4]]}"#);
    let r = run(&d, &["similarity", "d.json", "d.json", "sing.json"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn tolerance_accepts_scientific_notation() {
    let d = dir();
    write(&d, "d.json", D12);
    let r = run(&d, &["basis", "d.json", "--tol", "1e-9"]);
    assert_eq!(r.code, 0);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["tolerance"]["rel"].as_f64(), Some(1e-9));
    assert_eq!(doc["command"]["flags"]["tol"].as_f64(), Some(1e-9));
}

#[test]
fn adjoint_mode_is_flagged_on_complex_input() {
    let d = dir();
    write(&d, "i.json", r#"{"n":1,"entries":[[[0,1]]]}"#);
    let r = run(&d, &["basis", "i.json", "--mode", "adjoint"]);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["result"]["is_commutant"], false);
    assert_eq!(doc["result"]["dim"], 0);
    let r = run(&d, &["basis", "i.json"]);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["result"]["is_commutant"], true);
    assert_eq!(doc["result"]["dim"], 1);
}

#[test]
fn in_process_run_matches_the_binary() {
    let d = dir();
    let p = write(&d, "d.json", D12);
    let path = p.to_str().unwrap();
    let bin = run(&d, &["spectrum", path]);
    let lib = kronsum_cli::run(["kronsum", "spectrum", path]);
    assert_eq!(lib.code, bin.code);
    assert_eq!(lib.stdout, bin.stdout);
}

#[test]
fn seeded_witnesses_are_reproducible_and_differ_from_min_norm() {
    let d = dir();
    write(&d, "d.json", D12);
    write(&d, "m.json", r#"{"n":2,"entries":[[0,-1],[0,0]]}"#);
    let plain = run(&d, &["witness", "d.json", "m.json"]).stdout;
    let seeded = run(&d, &["witness", "d.json", "m.json", "--seed", "3"]).stdout;
    assert_eq!(seeded, run(&d, &["witness", "d.json", "m.json", "--seed", "3"]).stdout);
    let x = |s: &str| serde_json::from_str::<Value>(s).unwrap()["result"]["x"].clone();
    assert_ne!(x(&plain), x(&seeded));
}
