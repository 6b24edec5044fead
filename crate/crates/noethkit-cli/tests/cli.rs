use std::path::Path;
use std::process::{Command, Output};

use noethkit::space::SpaceExpr;
use noethkit::syntax;
use serde_json::Value;

fn noethkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noethkit"))
        .args(args)
        .env_remove("NOETHKIT_ORACLE_BOUND")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = noethkit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

#[test]
fn member_query() {
    let v = json(&["eval", "member", "(word a b b)", "(wordopen (up a) (up b))", "--space", "(words (fin a b))"]);
    assert_eq!(v["result"], true);
    let v = json(&["eval", "member", "(word b a)", "(wordopen (up a) (up b))", "--space", "(words (fin a b))"]);
    assert_eq!(v["result"], false);
}

#[test]
fn other_queries() {
    let v = json(&["eval", "leq", "(word a b)", "(word b a b)", "--space", "(words (fin a b))"]);
    assert_eq!(v["result"], true);
    let v = json(&["eval", "includes", "(wordopen (up a) (up b))", "(wordopen (up b))", "--space", "(words (fin a b))"]);
    assert_eq!(v["result"]["verdict"], "True");
    let v = json(&["eval", "closure", "5", "--space", "nat", "--bound", "8"]);
    assert_eq!(v["extent"].as_array().unwrap().len(), 6);
}

#[test]
fn div_iteration_has_the_initial_segments() {
    let v = json(&["iterate", "div", "--steps", "3"]);
    let stages = v["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 3);
    for (k, stage) in stages.iter().enumerate() {
        let exprs: Vec<&str> = stage["generators"].as_array().unwrap().iter().map(|g| g["expr"].as_str().unwrap()).collect();
        let mut want = vec!["empty".to_string(), "whole".to_string()];
        want.extend((1..=k + 1).map(|i| format!("(up {i})")));
        let mut got: Vec<String> = exprs.iter().map(|s| s.to_string()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want, "stage {}", k + 1);
    }
}

#[test]
fn bad_chain_for_the_bad_iterator() {
    let v = json(&["badchain", "baditer", "--length", "5", "--bound", "6"]);
    let chain = v["chain"].as_array().unwrap();
    assert_eq!(chain.len(), 5);
    let ws = syntax::space_from_str("(words (fin a b))").unwrap();
    for (k, link) in chain.iter().enumerate() {
        let u = syntax::open_from_str(&ws, link.as_str().unwrap()).unwrap();
        let got = noethkit::sets::extent_open(&ws, &u, 6).unwrap();
        let want: Vec<_> = noethkit::space::enumerate_points(&ws, 6)
            .unwrap()
            .into_iter()
            .filter(|p| {
                let s = p.to_string();
                (0..=k).any(|i| s.starts_with(&format!("(word {}b", "a ".repeat(i))))
            })
            .collect();
        assert_eq!(got, want, "link {k}");
    }
    assert_eq!(json(&["badchain", "regsubexp", "--length", "4", "--bound", "5"])["chain"], Value::Null);
}

#[test]
fn cover_matches_the_frozen_verdict() {
    let v = json(&["cover", &fixture("petri3.json")]);
    let frozen: Value = serde_json::from_str(&std::fs::read_to_string(fixture("petri3_cover.json")).unwrap()).unwrap();
    assert_eq!(v, frozen);
}

#[test]
fn divisibility_checks() {
    let words = "(mu (sum unit (prod (fin a b) id)))";
    let v = json(&["divisibility", words, "--depth", "4", "--check", "coincidence"]);
    assert_eq!((v["equal"].clone(), v["bound"].clone()), (Value::Bool(true), Value::from(3)));
    let trees = "(prod (fin a b) (list id))";
    assert_eq!(json(&["divisibility", trees, "--depth", "3", "--check", "coincidence"])["equal"], true);
    assert_eq!(json(&["divisibility", words, "--depth", "5", "--check", "stability"])["holds"], true);
    assert_eq!(json(&["divisibility", trees, "--depth", "3", "--check", "embedding"])["holds"], true);
}

#[test]
fn dot_and_json_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("rse.dot");
    let out = dir.path().join("rse.json");
    let v = json(&[
        "iterate",
        "regsubexp",
        "--steps",
        "2",
        "--dot-out",
        dot.to_str().unwrap(),
        "--json-out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert_eq!(text.matches("[label=").count(), 8);
    assert_eq!(text.matches("->").count(), 12);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, v);
}

#[test]
fn runs_are_deterministic() {
    let args = ["iterate", "treeexp", "--steps", "2", "--bound", "3"];
    assert_eq!(noethkit(&args).stdout, noethkit(&args).stdout);
    let alg = ["alg", "3", "3", "3", "--schedule", "random", "--seed", "5"];
    assert_eq!(noethkit(&alg).stdout, noethkit(&alg).stdout);
}

#[test]
fn printed_expressions_reparse() {
    for (expander, space) in [
        ("regsubexpord", "(ordwords (fin a b) w)"),
        ("treeexp", "(trees (fin a b))"),
        ("baditer", "(words (fin a b))"),
    ] {
        let v = json(&["iterate", expander, "--steps", "2", "--bound", "3"]);
        let s: SpaceExpr = syntax::space_from_str(space).unwrap();
        assert_eq!(syntax::space_from_str(v["space"].as_str().unwrap()).unwrap(), s);
        for stage in v["stages"].as_array().unwrap() {
            for g in stage["generators"].as_array().unwrap() {
                let text = g["expr"].as_str().unwrap();
                let parsed = syntax::open_from_str(&s, text).unwrap();
                assert_eq!(parsed.to_string(), text);
                assert_eq!(syntax::open_from_str(&s, &parsed.to_string()).unwrap(), parsed);
            }
        }
    }
}

#[test]
fn alg_trace_is_frozen() {
    let v = json(&["alg", "2", "1", "1"]);
    assert_eq!(v["trace"], serde_json::json!([[2, 1, 1], [1, 1, 2], [4, 0, 1], [3, 0, 2]]));
    assert_eq!(json(&["alg", "0", "0", "0", "--schedule", "l"])["length"], 1);
}

#[test]
fn exit_codes() {
    let parse = noethkit(&["eval", "member", "(word a b", "whole", "--space", "(words (fin a b))"]);
    assert_eq!(parse.status.code(), Some(2));
    assert!(parse.stdout.is_empty());
    let domain = noethkit(&["divisibility", "(list id)", "--check", "coincidence"]);
    assert_eq!(domain.status.code(), Some(1));
    let fuel = noethkit(&["cover", &fixture("petri3.json"), "--fuel", "1"]);
    assert_eq!(fuel.status.code(), Some(1));
    assert_eq!(noethkit(&["iterate", "nosuch"]).status.code(), Some(2));
}

#[test]
fn bound_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_noethkit"))
        .args(["iterate", "div", "--steps", "1"])
        .env("NOETHKIT_ORACLE_BOUND", "7")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bound"], 7);
    assert_eq!(json(&["iterate", "div", "--steps", "1"])["bound"], 4);
}

#[test]
fn good_sequence_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("seq.txt");
    std::fs::write(&f, "(up (word a b))\n(up (word b a))\n(up (word a a b))\n").unwrap();
    let v = json(&["good", f.to_str().unwrap(), "--space", "(words (fin a b))"]);
    assert_eq!(v["index"], 2);
}
