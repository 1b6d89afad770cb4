use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn girylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_girylab"))
        .args(args)
        .env_remove("GIRYLAB_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn check_passing_suite_exits_zero() {
    let out = girylab(&["check", "--suite", "permutation-min", "--suite", "round-trip", "--random", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["passed"], json!(true));
    let names: Vec<&str> = doc["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["permutation-min", "round-trip"]);
    assert_eq!(doc["config"]["random_cases"], json!(20));
}

#[test]
fn check_ns_with_n() {
    let out = girylab(&["check", "--suite", "ns-equivalence", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["suites"][0]["laws"][0]["cases"], json!(256));
    assert_eq!(girylab(&["check", "--suite", "ns-equivalence", "--n", "6"]).status.code(), Some(2));
}

#[test]
fn check_law_failure_exits_one() {
    // scvx-axioms contains the non-affine j case on the divergent sum.
    let out = girylab(&["check", "--suite", "scvx-axioms", "--random", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    let laws = doc["suites"][0]["laws"].as_array().unwrap();
    let failing: Vec<&str> =
        laws.iter().filter(|l| l["failure_count"] != json!(0)).map(|l| l["law"].as_str().unwrap()).collect();
    assert_eq!(failing, ["j-affine-on-divergent-sum"]);
}

#[test]
fn check_usage_errors_exit_two() {
    assert_eq!(girylab(&["check", "--suite", "nosuch"]).status.code(), Some(2));
    assert_eq!(girylab(&["check", "--grid", "x"]).status.code(), Some(2));
    assert_eq!(girylab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn check_config_file_and_json_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cfg.json", r#"{"suites": ["permutation-min"], "seed": 9}"#);
    let report = dir.path().join("out.json");
    let out = girylab(&["check", "--config", cfg.to_str().unwrap(), "--json", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(written, stdout_json(&out));
    assert_eq!(written["config"]["seed"], json!(9));
    let bad = write(&dir, "bad.json", r#"{"suits": []}"#);
    assert_eq!(girylab(&["check", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_girylab"))
        .args(["check", "--suite", "permutation-min"])
        .env("GIRYLAB_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["config"]["seed"], json!(42));
}

#[test]
fn eval_expressions() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "e.json", r#"{"op": "eps_N", "dist": {"weights": [[2, "1/2"], [5, "1/2"]]}}"#);
    let out = girylab(&["eval", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!(2));

    let bad_mass = write(&dir, "m.json", r#"{"op": "normalize", "dist": {"weights": [[0, "1/2"]]}}"#);
    assert_eq!(girylab(&["eval", bad_mass.to_str().unwrap()]).status.code(), Some(2));
    let malformed = write(&dir, "x.json", "{ not json");
    assert_eq!(girylab(&["eval", malformed.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(girylab(&["eval", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn refine_applies_script() {
    let dir = TempDir::new().unwrap();
    let tree = write(&dir, "t.json", r#"{"points": ["a", "b", "c"]}"#);
    let script = write(
        &dir,
        "s.json",
        r#"[{"atom": 0, "left": ["a"], "right": ["b", "c"]}, {"atom": 1, "left": ["b"], "right": ["c"]}]"#,
    );
    let out = girylab(&["refine", tree.to_str().unwrap(), "--script", script.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["depth"], json!(3));
    assert_eq!(doc["collapses"], json!([[0, 0], [0, 1, 1]]));
    assert_eq!(doc["passed"], json!(true));
    assert_eq!(doc["tree"]["splits"].as_array().unwrap().len(), 2);
}

#[test]
fn refine_without_script_echoes_tree() {
    let dir = TempDir::new().unwrap();
    let body = json!({"points": ["x", "y"], "splits": [{"atom": 0, "left": ["y"], "right": ["x"]}]});
    let tree = write(&dir, "t.json", &body.to_string());
    let out = girylab(&["refine", tree.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["tree"], body);
}

#[test]
fn refine_rejects_bad_splits() {
    let dir = TempDir::new().unwrap();
    let tree = write(&dir, "t.json", r#"{"points": ["a", "b"]}"#);
    let empty = write(&dir, "e.json", r#"[{"atom": 0, "left": [], "right": ["a", "b"]}]"#);
    let out = girylab(&["refine", tree.to_str().unwrap(), "--script", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let overlap = write(&dir, "o.json", r#"[{"atom": 0, "left": ["a"], "right": ["a", "b"]}]"#);
    assert_eq!(girylab(&["refine", tree.to_str().unwrap(), "--script", overlap.to_str().unwrap()]).status.code(), Some(2));
    let out_of_range = write(&dir, "r.json", r#"[{"atom": 3, "left": ["a"], "right": ["b"]}]"#);
    assert_eq!(
        girylab(&["refine", tree.to_str().unwrap(), "--script", out_of_range.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
