//! End-to-end checks of the command-line surface: exit codes, output
//! formats, and byte-level determinism.

use std::process::{Command, Output};

fn trimatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trimatch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn gen_writes_canonical_format() {
    let out = trimatch(&["gen", "parity:n=9"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("9 "));
    // parseable and canonical
    let g = trimatch::graph::ThreeGraph::from_text(&text).unwrap();
    assert_eq!(g.to_text(), text);
    assert_eq!(g.degree(0), 12);
}

#[test]
fn gen_to_file_and_load() {
    let path = std::env::temp_dir().join("trimatch_cli_space12.txt");
    let path_str = path.to_str().unwrap();
    let out = trimatch(&["gen", "space:n=12", "--out", path_str]);
    assert!(out.status.success());
    let out = trimatch(&["oracle", path_str]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("NoPerfectMatching"));
    assert!(text.contains("space obstruction"));
    std::fs::remove_file(path).ok();
}

#[test]
fn oracle_on_parity_barrier_prints_obstruction() {
    let out = trimatch(&["oracle", "parity:n=9"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("NoPerfectMatching"));
    assert!(text.contains("parity obstruction"));
}

#[test]
fn match_on_complete_graph_prints_triples() {
    let out = trimatch(&["match", "complete:n=12", "--gamma", "1/100", "--t", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("perfect matching (4 edges, validated)"));
}

#[test]
fn match_reports_profile_failure() {
    let out = trimatch(&["match", "space:n=12", "--gamma", "1/100", "--t", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("stage: ProfileCheck"));
    assert!(text.contains("no perfect matching emitted"));
}

#[test]
fn check_reports_first_violation() {
    let out = trimatch(&["check", "space:n=12", "--profile", "main:gamma=1/100,t=1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("violated at rank"));
    let out = trimatch(&["check", "complete:n=12", "--profile", "main:gamma=1/100,t=1"]);
    assert!(stdout(&out).contains("satisfied"));
}

#[test]
fn verify_exits_zero_and_json_carries_schema_version() {
    let out = trimatch(&["verify", "fact-xy", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["payload"][0]["universe"], 145_924);
    assert_eq!(v["payload"][0]["counterexamples"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_partition_counts_text() {
    let out = trimatch(&["verify", "partition-counts"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0 counterexamples"));
}

#[test]
fn almost_runs_with_force() {
    let out = trimatch(&["--force", "almost", "space:n=12", "--gamma", "1/100", "--t", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("profile not satisfied"));
}

#[test]
fn absorb_demo_on_complete_graph() {
    let out = trimatch(&[
        "absorb-demo",
        "complete:n=12",
        "--gamma",
        "1/100",
        "--budget",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("family (1 sets, budget 1)"));
    assert!(text.contains("matching:"));
}

#[test]
fn usage_errors_exit_two() {
    let out = trimatch(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = trimatch(&["verify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one() {
    let out = trimatch(&["oracle", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let out = trimatch(&["gen", "parity:n=12"]); // n/3 even
    assert_eq!(out.status.code(), Some(1));
    let out = trimatch(&["match", "complete:n=12", "--gamma", "0.01", "--t", "1"]);
    assert_eq!(out.status.code(), Some(1)); // gamma must be a rational literal
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "match",
        "planted:n=15,gamma=1/20,t=2,seed=3",
        "--gamma",
        "1/20",
        "--t",
        "2",
        "--seed",
        "3",
        "--format",
        "json",
    ];
    let first = trimatch(&args);
    let second = trimatch(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}
