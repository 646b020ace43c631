use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rw_core::catalog::{graphs, linear_orders};
use serde_json::Value;

fn rw(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rw"));
    cmd.args(args).env_remove("RW_BUDGET_NODES").env_remove("RW_BUDGET_SECS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn file(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

struct Fixture {
    dir: tempfile::TempDir,
    lo: String,
    g4: String,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let lo = file(dir.path(), "lo.json", &linear_orders(6).to_json());
    let g4 = file(dir.path(), "g4.json", &graphs(4).to_json());
    Fixture { dir, lo, g4 }
}

fn arrow_args<'a>(cat: &'a str, c: &'a str) -> Vec<&'a str> {
    vec!["arrow", "--catalog", cat, "--C", c, "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1"]
}

#[test]
fn arrow_exit_codes() {
    let f = fixture();
    let holds = rw(&arrow_args(&f.lo, "LO6"), &[]);
    assert_eq!(code(&holds), 0);
    let r = json(&holds);
    assert_eq!(r["status"], "HOLDS");
    assert_eq!(r["verdicts"][0]["exhaustion"][0]["kind"], "arrow");

    let fails = rw(&arrow_args(&f.lo, "LO5"), &[]);
    assert_eq!(code(&fails), 1);
    let cert = &json(&fails)["verdicts"][0]["certificates"][0];
    assert_eq!(cert["kind"], "bad_coloring");
    assert_eq!(cert["colors"].as_array().unwrap().len(), 10);
}

#[test]
fn budget_gives_unknown() {
    let f = fixture();
    let o = rw(&arrow_args(&f.lo, "LO6"), &[("RW_BUDGET_NODES", "3")]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    assert_eq!(r["status"], "UNKNOWN-AT-BOUND");
    assert_eq!(r["config"]["budget_nodes"], 3);
}

#[test]
fn usage_errors() {
    let f = fixture();
    assert_eq!(code(&rw(&["arrow", "--bogus"], &[])), 3);
    assert_eq!(code(&rw(&["--help"], &[])), 0);
    assert_eq!(code(&rw(&["arrow", "--C", "LO6", "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1"], &[])), 3);
    assert_eq!(code(&rw(&["arrow", "--catalog", &f.lo, "--C", "LO9", "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1"], &[])), 3);
    let bad = file(f.dir.path(), "bad.json", "{\n  \"signature\": {\n    \"relations\": [\n  ]\n");
    let o = rw(&arrow_args(&bad, "LO6"), &[]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("line"), "{err}");
}

#[test]
fn replay_detects_tampering() {
    let f = fixture();
    let fails = rw(&arrow_args(&f.lo, "LO5"), &[]);
    let good = file(f.dir.path(), "good.json", std::str::from_utf8(&fails.stdout).unwrap());
    assert_eq!(code(&rw(&["replay", &good], &[])), 0);

    let mut r = json(&fails);
    let colors = r["verdicts"][0]["certificates"][0]["colors"].as_array_mut().unwrap();
    colors.iter_mut().for_each(|c| *c = 0.into());
    let bad = file(f.dir.path(), "bad.json", &r.to_string());
    let o = rw(&["replay", &bad], &[]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["status"], "FAILS");

    r["verdicts"][0]["certificates"] = Value::Array(vec![]);
    let bare = file(f.dir.path(), "bare.json", &r.to_string());
    assert_eq!(code(&rw(&["replay", &bare], &[])), 1);

    let empty = file(f.dir.path(), "empty.json", "{}");
    assert_eq!(code(&rw(&["replay", &empty], &[])), 0);
    assert_eq!(code(&rw(&["replay", "/nonexistent/report.json"], &[])), 3);
}

#[test]
fn timing_is_opt_in() {
    let f = fixture();
    assert!(json(&rw(&arrow_args(&f.lo, "LO6"), &[])).get("timing_secs").is_none());
    let mut args = arrow_args(&f.lo, "LO6");
    args.push("--timing");
    assert!(json(&rw(&args, &[]))["timing_secs"].is_f64());
}

#[test]
fn verbose_summary_on_stderr() {
    let f = fixture();
    let mut args = arrow_args(&f.lo, "LO5");
    args.push("-v");
    let o = rw(&args, &[]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("arrow: FAILS"), "{err}");
}

#[test]
fn cnf_export() {
    let f = fixture();
    let out = f.dir.path().join("lo5.cnf");
    let mut args = arrow_args(&f.lo, "LO5");
    let p = out.display().to_string();
    args.extend(["--cnf", &p]);
    assert_eq!(code(&rw(&args, &[])), 1);
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.lines().any(|l| l.starts_with("p cnf ")));
}

#[test]
fn opposite_table_round_trip() {
    let f = fixture();
    let op = rw(&["cat", "op", "--catalog", &f.lo], &[]);
    assert_eq!(code(&op), 0);
    let table = file(f.dir.path(), "op.json", std::str::from_utf8(&op.stdout).unwrap());
    let back = rw(&["cat", "op", "--category", &table], &[]);
    let orig = rw(&["cat", "op", "--catalog", &f.lo, "--op"], &[]);
    assert_eq!(back.stdout, orig.stdout);

    let check = rw(&["cat", "check", "--category", &table], &[]);
    assert_eq!(code(&check), 1);
    let r = json(&check);
    assert_eq!(r["verdicts"][1]["status"], "FAILS");
    assert_eq!(r["verdicts"][2]["status"], "HOLDS");
    let report = file(f.dir.path(), "check.json", std::str::from_utf8(&check.stdout).unwrap());
    assert_eq!(code(&rw(&["replay", &report], &[])), 0);
}

#[test]
fn expansion_files() {
    let f = fixture();
    let built = rw(&["expand", "build", "--catalog", &f.g4, "--degree", "K2=2", "--objects", "P3"], &[]);
    assert_eq!(code(&built), 0);
    let v = json(&built);
    assert_eq!(v["expansions"].as_array().unwrap().len(), 16);
    assert_eq!(v["degrees"]["K2"], 2);
    let x = file(f.dir.path(), "p3x.json", std::str::from_utf8(&built.stdout).unwrap());
    let ep = rw(&["expand", "ep", "--catalog", &x], &[]);
    assert!(code(&ep) <= 2);
    let report = file(f.dir.path(), "ep.json", std::str::from_utf8(&ep.stdout).unwrap());
    assert_eq!(code(&rw(&["replay", &report], &[])), 0);
    assert_eq!(code(&rw(&["expand", "build", "--catalog", &f.g4, "--degree", "K2=0"], &[])), 3);
}

#[test]
fn seeded_monotest_is_recorded() {
    let f = fixture();
    let o = rw(&["seq", "monotest", "--catalog", &f.lo, "--samples", "50", "--seed", "9"], &[]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["config"]["seed"], 9);
    assert_eq!(r["verdicts"][0]["detail"]["violations"], 0);
}
