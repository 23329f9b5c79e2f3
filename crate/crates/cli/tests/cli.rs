use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn umod(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umod"))
        .args(args)
        .env("UMOD_CACHE", cache)
        .output()
        .expect("run umod")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn build_writes_a_document_and_caches_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.json");
    let o = umod(dir.path(), &["build", "--n", "1", "--variety", "nis", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("layers: [2, 2]"));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["n_elements"], 4);
    assert_eq!(doc["layer_sizes"], serde_json::json!([2, 2]));
    let cached = fs::read_dir(dir.path()).unwrap().filter_map(|e| e.ok()).any(|e| e.file_name().to_string_lossy().starts_with("nis-n1-"));
    assert!(cached);

    // second run is served from the cache and agrees
    let again = umod(dir.path(), &["build", "--n", "1", "--variety", "nis"]);
    let doc2: Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert_eq!(doc, doc2);
}

#[test]
fn truncated_build_still_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = umod(dir.path(), &["--no-cache", "build", "--n", "2", "--variety", "nis", "--max-layer", "2"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["layer_sizes"], serde_json::json!([6, 68]));
    assert_eq!(doc["truncated"], true);
}

#[test]
fn free_algebra_document() {
    let dir = tempfile::tempdir().unwrap();
    let o = umod(dir.path(), &["free", "--n", "1", "--variety", "nis"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["n_elements"], 8);
    assert_eq!(doc["generators"].as_array().unwrap().len(), 1);

    let dot = umod(dir.path(), &["free", "--n", "0", "--variety", "dense", "--format", "dot"]);
    assert_eq!(code(&dot), 0);
    assert!(stdout(&dot).starts_with("digraph"));
}

#[test]
fn decide_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let valid = umod(dir.path(), &["decide", "j(j(x1)) -> j(x1)", "--variety", "nis"]);
    assert_eq!(code(&valid), 0);
    assert_eq!(stdout(&valid).trim(), "VALID");

    let invalid = umod(dir.path(), &["decide", "j(x1) -> x1", "--variety", "nis"]);
    assert_eq!(code(&invalid), 1);
    let text = stdout(&invalid);
    assert!(text.starts_with("INVALID"));
    let json = &text[text.find('{').unwrap()..];
    let doc: Value = serde_json::from_str(json).unwrap();
    assert!(doc["n_elements"].as_u64().unwrap() >= 1);

    let out = dir.path().join("cm.json");
    let to_file = umod(dir.path(), &["decide", "x1", "--variety", "is", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&to_file), 1);
    assert!(out.exists());

    let parse_error = umod(dir.path(), &["decide", "x1 &", "--variety", "nis"]);
    assert_eq!(code(&parse_error), 2);
    assert!(String::from_utf8_lossy(&parse_error.stderr).contains("position"));

    let no_bottom = umod(dir.path(), &["decide", "0 -> x1", "--variety", "nis"]);
    assert_eq!(code(&no_bottom), 2);
}

#[test]
fn decide_reports_unknown_when_the_model_is_truncated() {
    let dir = tempfile::tempdir().unwrap();
    let o = umod(dir.path(), &["decide", "j(x1) -> j(x1)", "--variety", "nis", "--max-layer", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("UNKNOWN"));
}

#[test]
fn refute_finds_small_countermodels() {
    let dir = tempfile::tempdir().unwrap();
    let o = umod(dir.path(), &["refute", "j(0) -> 0", "--variety", "nis-bot", "--max-size", "2"]);
    assert_eq!(code(&o), 1);
    let none = umod(dir.path(), &["refute", "x1 -> x1", "--variety", "nis", "--max-size", "2"]);
    assert_eq!(code(&none), 2);
    assert!(stdout(&none).starts_with("UNKNOWN"));
}

const TWINS: &str = r#"{"format_version":1,"n_elements":2,"covers":[],"s":[0,1],"colors":[[],[]],"n_vars":1}"#;

#[test]
fn check_irreducibility() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.json");
    assert_eq!(code(&umod(dir.path(), &["build", "--n", "1", "--out", u.to_str().unwrap()])), 0);
    let ok = umod(dir.path(), &["check", u.to_str().unwrap(), "--irreducible", "--variety", "nis"]);
    assert_eq!(code(&ok), 0);
    let report: Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(report["irreducible"], true);
    assert_eq!(report["generates"], true);

    let twins = dir.path().join("twins.json");
    fs::write(&twins, TWINS).unwrap();
    let bad = umod(dir.path(), &["check", twins.to_str().unwrap(), "--irreducible", "--variety", "nis"]);
    assert_eq!(code(&bad), 1);
    let report: Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(report["irreducible"], false);
    assert_eq!(report["generates"], false);

    let plain = umod(dir.path(), &["check", twins.to_str().unwrap()]);
    assert_eq!(code(&plain), 0);

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{\"format_version\": 99}").unwrap();
    assert_eq!(code(&umod(dir.path(), &["check", garbage.to_str().unwrap()])), 2);
}

#[test]
fn subalgebras_and_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let twins = dir.path().join("twins.json");
    fs::write(&twins, TWINS).unwrap();
    let all = umod(dir.path(), &["subalgebras", twins.to_str().unwrap(), "--mode", "nuclear"]);
    assert_eq!(code(&all), 0);
    let doc: Value = serde_json::from_str(&stdout(&all)).unwrap();
    let parts = doc["partitions"].as_array().unwrap();
    assert!(parts.iter().any(|p| p["classification"]["total"] == true));

    let maximal = umod(dir.path(), &["subalgebras", twins.to_str().unwrap(), "--mode", "nuclear", "--maximal"]);
    let doc: Value = serde_json::from_str(&stdout(&maximal)).unwrap();
    assert!(doc["partitions"].as_array().unwrap().len() < parts.len());

    let u = dir.path().join("u.json");
    assert_eq!(code(&umod(dir.path(), &["build", "--n", "1", "--out", u.to_str().unwrap()])), 0);
    let e = umod(dir.path(), &["embed", u.to_str().unwrap(), "--variety", "nis"]);
    assert_eq!(code(&e), 0);
    let pairs: Value = serde_json::from_str(&stdout(&e)).unwrap();
    assert_eq!(pairs.as_array().unwrap().len(), 4);
    assert_eq!(code(&umod(dir.path(), &["embed", twins.to_str().unwrap(), "--variety", "nis"])), 1);
}

#[test]
fn export_detects_document_kind() {
    let dir = tempfile::tempdir().unwrap();
    let twins = dir.path().join("twins.json");
    fs::write(&twins, TWINS).unwrap();
    let dot = umod(dir.path(), &["export", twins.to_str().unwrap(), "--format", "dot"]);
    assert_eq!(code(&dot), 0);
    assert!(stdout(&dot).contains("peripheries=2"));

    let alg = dir.path().join("alg.json");
    assert_eq!(code(&umod(dir.path(), &["free", "--n", "1", "--out", alg.to_str().unwrap()])), 0);
    let dot = umod(dir.path(), &["export", alg.to_str().unwrap()]);
    assert_eq!(code(&dot), 0);
    assert!(stdout(&dot).contains("a0"));
}

#[test]
fn verify_duality_small() {
    let dir = tempfile::tempdir().unwrap();
    let o = umod(dir.path(), &["verify-duality", "--max-size", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);
}
