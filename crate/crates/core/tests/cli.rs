use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn forge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge")).current_dir(dir).args(args).output().expect("forge runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = forge(dir, args);
    assert!(out.status.success(), "forge {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(dir: &Path, file: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(file)).unwrap()).unwrap()
}

#[test]
fn tsp_chain_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["gen", "--vars", "3", "--eqs", "1", "--seed", "4", "--out", "i.txt", "--assign-out", "a.json"]);
    ok(d, &["to-hybrid", "--in", "i.txt", "--b", "0", "--balance", "--out", "h.json"]);
    ok(d, &["to-tsp", "--in", "h.json", "--out", "gs.json"]);
    let summary: Value = serde_json::from_str(ok(d, &["tour", "--graph", "gs.json", "--assign", "a.json", "--out", "t.json"]).trim()).unwrap();
    assert_eq!(summary["cost"], "250");
    ok(d, &["extract", "--graph", "gs.json", "--tour", "t.json", "--out", "e.json"]);
    let e = json(d, "e.json");
    assert_eq!(e["unsat"], 0);
    assert_eq!(e["original"], json(d, "a.json")["original"]);
    ok(d, &["audit", "--graph", "gs.json", "--tour", "t.json", "--out", "au.json"]);
    assert_eq!(json(d, "au.json")["tour_cost"], "250");
    // The extraction output is itself a valid assignment file.
    ok(d, &["tour", "--graph", "gs.json", "--assign", "e.json", "--out", "t2.json"]);
    assert_eq!(json(d, "t.json"), json(d, "t2.json"));
}

#[test]
fn atsp_chain_with_expanded_tour() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["gen", "--vars", "4", "--eqs", "2", "--flips", "1", "--seed", "2", "--out", "i.txt", "--assign-out", "a.json"]);
    ok(d, &["to-hybrid", "--in", "i.txt", "--b", "1", "--balance", "--out", "h.json"]);
    ok(d, &["to-atsp", "--in", "h.json", "--lambda", "1/4", "--out", "ga.json"]);
    ok(d, &["tour", "--graph", "ga.json", "--assign", "a.json", "--L", "5", "--out", "tx.json"]);
    ok(d, &["extract", "--graph", "ga.json", "--tour", "tx.json", "--L", "5", "--strict", "--out", "e.json"]);
    let e = json(d, "e.json");
    assert!(e["unsat"].as_u64().unwrap() <= 4);
    assert_eq!(e["collapse"]["repaired_paths"].as_array().unwrap().len(), 0);
    // Reading the expanded tour as an unexpanded one fails with an input error.
    assert_eq!(forge(d, &["extract", "--graph", "ga.json", "--tour", "tx.json"]).status.code(), Some(2));
}

#[test]
fn export_tsplib_and_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("m.json"), r#"{"entries": [["0","1","10"],["10","0","1"],["1","10","0"]]}"#).unwrap();
    for method in ["hk", "perm"] {
        let r: Value = serde_json::from_str(&ok(d, &["oracle", "--matrix", "m.json", "--method", method])).unwrap();
        assert_eq!(r["cost"], "3");
    }
    ok(d, &["gen", "--out", "i.txt"]);
    ok(d, &["to-hybrid", "--in", "i.txt", "--balance", "--out", "h.json"]);
    ok(d, &["to-tsp", "--in", "h.json", "--out", "gs.json"]);
    ok(d, &["export", "--graph", "gs.json", "--L", "0", "--tsplib", "--out", "gs.tsp"]);
    let text = std::fs::read_to_string(d.join("gs.tsp")).unwrap();
    assert!(text.contains("TYPE: TSP") && text.contains("DIMENSION: 117") && text.contains("FULL_MATRIX"));
    let parsed = gapforge::graph::parse_tsplib(&text).unwrap();
    assert_eq!(parsed.dimension, 117);
}

#[test]
fn pipeline_report_and_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["pipeline", "--seed", "3", "--mutations", "20", "--out", "r1.json"]);
    ok(d, &["pipeline", "--seed", "3", "--mutations", "20", "--out", "r2.json"]);
    assert_eq!(std::fs::read(d.join("r1.json")).unwrap(), std::fs::read(d.join("r2.json")).unwrap());
    let r = json(d, "r1.json");
    assert_eq!(r["report_v"], 1);
    assert_eq!(r["tsp"]["constructed"]["cost"], "250");
    assert_eq!(r["atsp"]["constructed"]["cost"], "659/4");
    let printed = ok(d, &["report", "--in", "r1.json"]);
    assert!(printed.lines().all(|l| l.starts_with("PASS")));
    assert!(printed.contains("123/122") && printed.contains("75/74"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("bad.txt"), "x1 x2 = 0\n").unwrap();
    assert_eq!(forge(d, &["balance", "--in", "bad.txt"]).status.code(), Some(2));
    assert_eq!(forge(d, &["no-such-command"]).status.code(), Some(2));
    std::fs::write(d.join("big.json"), serde_json::json!({"entries": vec![vec!["1"; 11]; 11]}).to_string()).unwrap();
    assert_eq!(forge(d, &["oracle", "--matrix", "big.json", "--method", "perm"]).status.code(), Some(4));
    // A pipeline report with a failing check is an invariant violation.
    ok(d, &["pipeline", "--mutations", "0", "--target", "tsp", "--out", "r.json"]);
    let mut r = json(d, "r.json");
    r["checks"][0]["pass"] = Value::Bool(false);
    std::fs::write(d.join("r.json"), r.to_string()).unwrap();
    assert_eq!(forge(d, &["report", "--in", "r.json"]).status.code(), Some(3));
    // A b = 1 Hybrid instance cannot feed the undirected reduction.
    ok(d, &["gen", "--out", "i.txt"]);
    ok(d, &["to-hybrid", "--in", "i.txt", "--b", "1", "--balance", "--out", "h1.json"]);
    assert_eq!(forge(d, &["to-tsp", "--in", "h1.json"]).status.code(), Some(2));
}

#[test]
fn amplifier_and_prob_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["amplifier-check", "--n", "1", "--seed", "5", "--out", "w.json"]);
    let w = json(d, "w.json");
    std::fs::write(d.join("wheel.json"), w["wheel"].to_string()).unwrap();
    let again: Value = serde_json::from_str(&ok(d, &["amplifier-check", "--in", "wheel.json"])).unwrap();
    assert_eq!(again["certificate"], w["certificate"]);
    assert_eq!(forge(d, &["amplifier-check", "--n", "3"]).status.code(), Some(4));
    let p: Value = serde_json::from_str(&ok(d, &["prob-check", "--max-n", "3", "--ratio-max-n", "4"])).unwrap();
    assert_eq!(p["ratio_cells"], p["ratio_true"]);
}
