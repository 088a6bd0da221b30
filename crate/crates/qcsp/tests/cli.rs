//! End-to-end runs of the `qcsp` binary: text and JSON output, exit codes,
//! and error reporting.

mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::fixture_path;
use serde_json::Value as Json;

fn qcsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcsp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn json(out: &Output) -> Json {
    serde_json::from_str(&stdout(out)).expect("valid json on stdout")
}

fn fixture(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("qcsp-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).expect("temp file writes");
    path
}

#[test]
fn solve_prints_truth_and_succeeds() {
    let out = qcsp(&["solve", &fixture("phi1.qcsp")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "true");
}

#[test]
fn solve_expect_true_fails_on_a_false_problem() {
    let file = write_temp("false.qcsp", "qcsp\nvar x exists 0..1\nconstraint expr x > 5\n");
    let out = qcsp(&["solve", file.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "false");
    let out = qcsp(&["solve", "--expect-true", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(file).ok();
}

#[test]
fn outcomes_lists_tuples_and_truncates() {
    let out = qcsp(&["outcomes", &fixture("phi1.qcsp")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "(2,3,5)\n(2,3,6)\n(2,4,6)");

    let out = qcsp(&["--json", "outcomes", "--limit", "2", &fixture("phi1.qcsp")]);
    let doc = json(&out);
    assert_eq!(doc["command"], "outcomes");
    assert_eq!(doc["count"], 3);
    assert_eq!(doc["truncated"], true);
    assert_eq!(doc["tuples"].as_array().unwrap().len(), 2);
}

#[test]
fn outcome_membership() {
    let out = qcsp(&["outcomes", "--member", "8,4,7,1,10", &fixture("phi3.qcsp")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "member (8,4,7,1,10): true");

    let out = qcsp(&["--json", "outcomes", "--member", "6,6,6,6,6", &fixture("phi3.qcsp")]);
    let doc = json(&out);
    assert_eq!(doc["command"], "membership");
    assert_eq!(doc["is_outcome"], false);

    let out = qcsp(&["outcomes", "--member", "1,2", &fixture("phi3.qcsp")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("5 variables"));
}

#[test]
fn check_reports_a_verdict() {
    let out = qcsp(&[
        "--json", "check", "--family", "deep", "--kind", "inconsistent",
        "--var", "x1", "--val", "3", &fixture("phi1.qcsp"),
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["command"], "check");
    assert_eq!(doc["verdict"]["holds"], true);
    assert_eq!(doc["query"]["family"], "deep");

    let out = qcsp(&[
        "check", "--family", "classical", "--kind", "implied",
        "--var", "x1", "--val", "2", &fixture("phi1.qcsp"),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("holds: false"));
    assert!(text.contains("witness:"));
}

#[test]
fn check_rejects_malformed_queries() {
    // substitutable needs a second value
    let out = qcsp(&[
        "check", "--family", "deep", "--kind", "substitutable",
        "--var", "x3", "--val", "5", &fixture("phi1.qcsp"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn simplify_narrows_the_domains() {
    let out = qcsp(&["--json", "simplify", "--verify", &fixture("phi1.qcsp")]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["command"], "simplify");
    assert!(doc["problem"].as_str().unwrap().contains("var x1 exists 2..2"));
    for step in doc["log"]["steps"].as_array().unwrap() {
        assert_eq!(step["truth_before"], step["truth_after"]);
    }
}

#[test]
fn local_detection_and_pruning() {
    let out = qcsp(&[
        "--json", "local", "--kind", "inconsistent", "--var", "x1", "--val", "3",
        &fixture("phi1.qcsp"),
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["command"], "local");
    assert_eq!(doc["report"]["combined"], true);

    let out = qcsp(&[
        "local", "--kind", "removable", "--var", "x3", "--val", "5", &fixture("phi1.qcsp"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no sound per-constraint rule"));

    let out = qcsp(&["--json", "local", "--prune", &fixture("phi4.qcsp")]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["command"], "local-prune");
    assert!(doc["problem"].as_str().unwrap().contains("var x exists 2..2"));
}

#[test]
fn validate_small_batch_is_clean() {
    let out = qcsp(&["--json", "validate", "--count", "10", "--seed", "7"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["command"], "validate");
    assert_eq!(doc["report"]["instances"], 10);
    assert_eq!(doc["report"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn parse_errors_carry_positions() {
    let file = write_temp("bad.qcsp", "qcsp\nvar x exists 5..2\n");
    let out = qcsp(&["solve", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("line 2"));
    assert!(msg.contains("empty domain"));
    std::fs::remove_file(file).ok();
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = qcsp(&["solve", "--frobnicate", &fixture("phi1.qcsp")]);
    assert_eq!(out.status.code(), Some(2));
}
