use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TRIANGLE: &str = r#"{"vertices":[1,2,3],"rotations":{"1":[2,3],"2":[3,1],"3":[1,2]},"outer":[1,2,3]}"#;
const TRIANGLE_LISTS: &str = r#"{"1":[1],"2":[2],"3":[1,2,3]}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_colourer"));
    c.env_remove("COLOURER_JOBS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn colour_triangle() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", TRIANGLE);
    let l = write(&d, "l.json", TRIANGLE_LISTS);
    let trace = d.path().join("trace.jsonl");
    let o = run(&["colour", s(&g), s(&l), "--trace", s(&trace)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["colouring"], serde_json::json!({"1": 1, "2": 2, "3": 3}));
    assert!(v["tool_version"].is_string() && v["config_hash"].is_string());
    let lines = std::fs::read_to_string(trace).unwrap();
    let first: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["case"], "base");
}

#[test]
fn colour_other_algorithms() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", TRIANGLE);
    let l = write(&d, "l.json", TRIANGLE_LISTS);
    assert_eq!(run(&["colour", s(&g), s(&l), "--algorithm", "oracle"]).status.code(), Some(0));
    let l5 = write(&d, "l5.json", r#"{"1":[1],"2":[2],"3":[3,4,5]}"#);
    let o = run(&["colour", s(&g), s(&l5), "--algorithm", "thomassen5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["colouring"]["3"], 3);
    let unsat = write(&d, "u.json", r#"{"1":[1],"2":[2],"3":[1,2]}"#);
    assert_eq!(run(&["colour", s(&g), s(&unsat), "--algorithm", "oracle"]).status.code(), Some(2));
}

#[test]
fn inadmissible_and_malformed_inputs() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", TRIANGLE);
    let bad = write(&d, "bad.json", r#"{"1":[1],"2":[1],"3":[1,2,3]}"#);
    let o = run(&["colour", s(&g), s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("share the colour 1"));
    let junk = write(&d, "junk.json", "{not json");
    assert_eq!(run(&["colour", s(&junk), s(&bad)]).status.code(), Some(1));
    assert_eq!(run(&["colour", "/nonexistent/g.json", s(&bad)]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn verify_outcomes() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", TRIANGLE);
    let l = write(&d, "l.json", TRIANGLE_LISTS);
    let good = write(&d, "c.json", r#"{"1":1,"2":2,"3":3}"#);
    assert_eq!(run(&["verify", s(&g), s(&l), s(&good)]).status.code(), Some(0));
    let clash = write(&d, "c2.json", r#"{"1":1,"2":1,"3":3}"#);
    let o = run(&["verify", s(&g), s(&l), s(&clash)]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_out(&o);
    assert_eq!(v["violation"]["violation"], "improper_edge");
    assert_eq!((v["violation"]["u"].as_u64(), v["violation"]["v"].as_u64()), (Some(1), Some(2)));
    let missing = write(&d, "c3.json", r#"{"1":1,"2":2}"#);
    let o = run(&["verify", s(&g), s(&l), s(&missing)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_out(&o)["violation"]["vertex"], 3);
}

#[test]
fn enumerate_counts_and_formats() {
    let o = run(&["enumerate", "--max-n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 graphs"));
    let o = run(&["enumerate", "--max-n", "8"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains(&format!("{} graphs", 1 + 1 + 2 + 5 + 14)));
    let o = run(&["enumerate", "--max-n", "6", "--k", "3..6", "--format", "dot"]);
    let dot = String::from_utf8_lossy(&o.stdout);
    assert_eq!(dot.matches("graph \"").count(), 1 + 2 + 4 + 16);
    assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    let o = run(&["enumerate", "--max-n", "5", "--format", "planar_code"]);
    assert!(o.stdout.starts_with(b">>planar_code<<"));
    assert_eq!(run(&["enumerate", "--max-n", "40"]).status.code(), Some(1));
}

#[test]
fn falsify_exit_codes_and_report() {
    let o = run(&["falsify", "--checks", "four_colourability", "--max-n", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["checks"]["four_colourability"]["verdict"], "CONFIRMED_AT_SCALE");
    assert!(v["config_hash"].as_str().unwrap().len() == 64);
    assert_eq!(run(&["falsify", "--checks", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["falsify", "--max-n", "2"]).status.code(), Some(1));
}

#[test]
fn falsify_counterexample_replays_through_colour() {
    let o = run(&["falsify", "--max-n", "5", "--checks", "engine_vs_oracle"]);
    let report = json_out(&o);
    let check = &report["checks"]["engine_vs_oracle"];
    let code = o.status.code();
    assert!(code == Some(0) || code == Some(3));
    if check["verdict"] == "CONFIRMED_AT_SCALE" {
        assert_eq!(code, Some(0));
        return;
    }
    assert_eq!(code, Some(3));
    let d = TempDir::new().unwrap();
    let witnesses = check["summary"]["minimal_by_kind"].as_object().unwrap();
    assert!(!witnesses.is_empty());
    for w in witnesses.values().filter(|w| w["kind"] == "engine_failure") {
        let g = write(&d, "g.json", &w["instance"].to_string());
        let l = write(&d, "l.json", &w["lists"].to_string());
        let o = run(&["colour", s(&g), s(&l)]);
        assert_eq!(o.status.code(), Some(2));
        assert_eq!(json_out(&o)["witness"], w["failure"]);
        let o = run(&["colour", s(&g), s(&l), "--fallback"]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(json_out(&o)["fallback"], true);
    }
}

#[test]
fn resume_matches_uninterrupted_run() {
    let d = TempDir::new().unwrap();
    let cp = d.path().join("cp.jsonl");
    let args = ["falsify", "--max-n", "5", "--checks", "engine_vs_oracle,thomassen_control"];
    let full = run(&args);
    let first = run(&[&args[..], &["--checkpoint", s(&cp)]].concat());
    assert_eq!(full.stdout, first.stdout);
    // drop half the units and cut the last line short, as after a crash
    let text = std::fs::read_to_string(&cp).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut kept = lines[..lines.len() / 2].join("\n");
    kept.push('\n');
    kept.push_str(&lines[lines.len() / 2][..10]);
    std::fs::write(&cp, kept).unwrap();
    let resumed = run(&[&args[..], &["--checkpoint", s(&cp), "--resume"]].concat());
    assert_eq!(full.stdout, resumed.stdout);
    let jobs = bin().args(args).env("COLOURER_JOBS", "3").output().unwrap();
    assert_eq!(full.stdout, jobs.stdout);
}
