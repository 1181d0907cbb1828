use std::fs;
use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::cargo_bin("shadowcalc").expect("binary")
}

fn stdout(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8")
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    serde_json::from_str(&stdout(&a)).expect("json")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).expect("write");
    p
}

fn kn_file(dir: &TempDir, n: i64) -> String {
    let text = stdout(&["gen", "kn", &n.to_string(), "--egf"]);
    write(dir, &format!("kn{n}.egf"), &text).display().to_string()
}

#[test]
fn alexander_of_presentation() {
    let out = stdout(&["alexander", "--pres", "gens: x,mu ; rels: x^2*mu*x^-1*mu^-1", "--meridian", "mu"]);
    assert_eq!(out.trim(), "2 - t");
}

#[test]
fn classify_kn3() {
    let dir = TempDir::new().unwrap();
    let f = kn_file(&dir, 3);
    let r = json(&["classify", &f, "--g", "3"]);
    assert_eq!(r["result"], serde_json::json!({ "classification": "Kn", "n": 3 }));
    assert_eq!(r["command"], "classify");
}

#[test]
fn knot_group_and_alexander_from_file() {
    let dir = TempDir::new().unwrap();
    let f = kn_file(&dir, -2);
    let r = json(&["alexander", &f, "--g", "1"]);
    assert_eq!(r["result"]["matches_kn"], -2);
    let g = json(&["knot-group", &f, "--g", "1"]);
    assert_eq!(g["result"]["meridian_only"], false);
}

#[test]
fn verify_x8_i() {
    let r = json(&["verify", "--family", "X8-i", "--max", "3"]);
    assert_eq!(r["matches_paper"], true);
    assert!(!r["result"]["survivors"].as_array().unwrap().is_empty());
}

#[test]
fn json_is_byte_identical() {
    let a = stdout(&["verify", "--family", "X3-i", "--max", "2", "--json"]);
    let b = stdout(&["verify", "--family", "X3-i", "--max", "2", "--json"]);
    assert_eq!(a, b);
}

#[test]
fn banded_pipeline() {
    let dir = TempDir::new().unwrap();
    let bud = write(&dir, "ts.bud", &stdout(&["gen", "twist-spun", "2", "1"]));
    let bud = bud.to_str().unwrap();
    assert_eq!(stdout(&["validate", bud]).trim(), "valid");
    let r = json(&["shadow", bud]);
    assert_eq!(r["result"]["true_vertices"], 14);
    assert_eq!(r["result"]["gleam_sum_over_k"], "0");
    assert_eq!(stdout(&["bound", bud]).trim(), "9");
}

#[test]
fn pi1_and_h1() {
    let dir = TempDir::new().unwrap();
    let f = kn_file(&dir, 1);
    assert!(stdout(&["pi1", &f]).contains("boundary b"));
    let r = json(&["h1", &f]);
    assert_eq!(r["result"]["h1"], "Z");
}

#[test]
fn move_sites_and_application() {
    let dir = TempDir::new().unwrap();
    let f = kn_file(&dir, 2);
    let r = json(&["move", &f, "--kind", "YV"]);
    assert!(!r["result"]["sites"].as_array().unwrap().is_empty());
    let moved = stdout(&["move", &f, "--kind", "YV", "--site", "0"]);
    let g = write(&dir, "moved.egf", &moved);
    let c = json(&["classify", g.to_str().unwrap(), "--g", "1"]);
    assert_eq!(c["result"]["n"], 2);
    let a = stdout(&["move", &f, "--kind", "YV", "--seed", "5"]);
    assert_eq!(a, stdout(&["move", &f, "--kind", "YV", "--seed", "5"]));
}

#[test]
fn custom_rule_table() {
    let dir = TempDir::new().unwrap();
    let f = kn_file(&dir, 1);
    let rules = write(&dir, "r.txt", "rule shift YV\n  lhs edge e\n  set e = e + 1\nend\n");
    let out = stdout(&["move", &f, "--kind", "YV", "--rules", rules.to_str().unwrap()]);
    assert!(out.lines().all(|l| l.contains("shift")), "{out}");
}

#[test]
fn input_errors_exit_2() {
    bin().arg("frobnicate").assert().code(2);
    bin().args(["classify", "/no/such/file.egf", "--g", "1"]).assert().code(2);
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.egf", "vertex b B\nedge e0 b:0 q:0 gleam=zz\n");
    bin().args(["pi1", bad.to_str().unwrap()]).assert().code(2);
    let bad = write(&dir, "bad.bud", "node a crossing over=x\n");
    bin().args(["shadow", bad.to_str().unwrap()]).assert().code(2);
    bin().args(["alexander"]).assert().code(2);
    bin().args(["gen", "kn", "0"]).assert().code(2);
}

#[test]
fn error_reports_in_json() {
    let out = bin().args(["classify", "/no/such/file.egf", "--g", "1", "--json"]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "input");
}
