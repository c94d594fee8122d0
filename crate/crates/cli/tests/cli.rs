use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stdvb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stdvb")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn built_site_checks_valid() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("site.json");
    for r in ["1", "2"] {
        assert_eq!(code(&stdvb(&["proj", "build", "--r", r, "--out", p(&f)])), 0);
        let o = stdvb(&["site", "check", p(&f)]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o).trim(), "valid");
    }
}

#[test]
fn broken_site_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("site.json");
    assert_eq!(code(&stdvb(&["proj", "build", "--r", "1", "--out", p(&f)])), 0);
    let mut j: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    // drop the pullback table: the chart covering loses its fibre products
    j["pullbacks"] = Value::Array(vec![]);
    std::fs::write(&f, j.to_string()).unwrap();
    let o = stdvb(&["site", "check", p(&f)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("pullback"), "{}", stdout(&o));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("junk.json");
    std::fs::write(&f, "{not json").unwrap();
    assert_eq!(code(&stdvb(&["site", "check", p(&f)])), 2);
    assert_eq!(code(&stdvb(&["bundle", "verify", p(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&stdvb(&["proj", "twist"])), 2);
}

#[test]
fn twist_cocycle_dump() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("o1.json");
    assert_eq!(code(&stdvb(&["proj", "twist", "--r", "1", "--n", "1", "--out", p(&f)])), 0);
    let o = stdvb(&["bundle", "cocycle", p(&f)]);
    assert_eq!(code(&o), 0);
    let d: Value = serde_json::from_str(&stdout(&o)).unwrap();
    // x0/x1 carries a section over U0 to U1
    assert_eq!(d["(U0,U1)"], "x0/x1");
    assert_eq!(d["(U1,U0)"], "x0/x1^-1");
    assert_eq!(d["(U0,U0)"], "1");

    let t = dir.path().join("o0.json");
    assert_eq!(code(&stdvb(&["proj", "twist", "--n", "0", "--out", p(&t)])), 0);
    let d: Value = serde_json::from_str(&stdout(&stdvb(&["bundle", "cocycle", p(&t)]))).unwrap();
    assert!(d.as_object().unwrap().values().all(|v| v == "1"));
}

#[test]
fn tensor_of_twists_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    let want = dir.path().join("want.json");
    stdvb(&["proj", "twist", "--r", "2", "--n", "2", "--out", p(&a)]);
    stdvb(&["proj", "twist", "--r", "2", "--n", "-3", "--out", p(&b)]);
    stdvb(&["proj", "twist", "--r", "2", "--n", "-1", "--out", p(&want)]);
    assert_eq!(code(&stdvb(&["bundle", "tensor", p(&a), p(&b), "--out", p(&c)])), 0);
    assert_eq!(std::fs::read_to_string(&c).unwrap(), std::fs::read_to_string(&want).unwrap());
    assert_eq!(code(&stdvb(&["bundle", "verify", p(&c)])), 0);
    assert_eq!(code(&stdvb(&["presheaf", "check", p(&c)])), 0);
}

#[test]
fn sum_ranks_add() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    stdvb(&["proj", "twist", "--n", "1", "--out", p(&a)]);
    let o = stdvb(&["bundle", "sum", p(&a), p(&a)]);
    assert_eq!(code(&o), 0);
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(j["ranks"].as_object().unwrap().values().all(|r| r == 2));
}

#[test]
fn pullback_to_a_chart() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    stdvb(&["proj", "twist", "--n", "3", "--out", p(&a)]);
    let o = stdvb(&["bundle", "pullback", p(&a), "--to", "U0"]);
    assert_eq!(code(&o), 0);
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["sieve"]["object"], "id_U0");
    assert_eq!(code(&stdvb(&["bundle", "pullback", p(&a), "--to", "nowhere"])), 2);
}

#[test]
fn twisted_checks() {
    for n in ["-3", "0", "3"] {
        assert_eq!(code(&stdvb(&["proj", "verify-oninf", "--n", n])), 0);
        assert_eq!(code(&stdvb(&["proj", "verify-onfunc", "--r", "2", "--n", n])), 0);
    }
}

#[test]
fn verify_scopes() {
    let o = stdvb(&["verify", "--scope", "tp-assoc", "--trials", "25"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("PASS"));
    assert_eq!(code(&stdvb(&["verify", "--scope", "notcommgen"])), 0);
    assert_eq!(code(&stdvb(&["verify", "--scope", "unknown-id"])), 2);
    assert_eq!(code(&stdvb(&["verify", "--scope", "oninf-min-negative"])), 1);
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "--scope", "cocycle-roundtrip", "--seed", "11", "--trials", "10", "--json"];
    let a = stdvb(&args);
    let b = stdvb(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let j: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(j["seed"], 11);
    assert!(j["results"][0].get("millis").is_none());
}

#[test]
fn every_claim_listed_once() {
    let o = stdvb(&["verify", "--list"]);
    let ids: Vec<String> = stdout(&o).lines().map(String::from).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), ids.len());
    assert!(ids.iter().any(|i| i == "functvb"));
}
