use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gtsearch_core::harness::{corpus, find_ttm_counterexample, CounterexampleSearch};
use gtsearch_core::{format, DEFAULT_GUARD};

fn gtsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtsearch"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SAMPLE: &str = r#"{"eval":0,"color":1,"children":[
  {"eval":5,"color":-1,"children":[{"eval":1,"color":1,"children":[]},{"eval":7,"color":1,"children":[]}]},
  {"eval":-2,"color":-1,"children":[]}]}"#;

#[test]
fn eval_leaf_and_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    let leaf = write(
        dir.path(),
        "leaf.json",
        r#"{"eval":7,"color":1,"children":[]}"#,
    );
    let o = gtsearch(&["eval", "--alg", "minimax", leaf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "7\n");

    let t = write(dir.path(), "t.json", SAMPLE);
    let t = t.to_str().unwrap();
    for (alg, expected) in [
        ("minimax", "1"),
        ("minimax-alg", "1"),
        ("negamax", "1"),
        ("negamax-alg", "1"),
        ("failsoft", "1"),
        ("failhard", "1"),
        ("ttw", "1"),
        ("ttm", "1"),
        ("ttw-hybrid-sad", "1"),
    ] {
        let o = gtsearch(&["eval", "--alg", alg, t]);
        assert_eq!(stdout(&o), format!("{expected}\n"), "{alg}");
    }
    let o = gtsearch(&["eval", "--alg", "negamax", "--depth", "1", t]);
    assert_eq!(stdout(&o), "5\n");
}

#[test]
fn eval_result_passes_check() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", SAMPLE);
    let t = t.to_str().unwrap();
    let table = dir.path().join("table.json");
    let o = gtsearch(&[
        "eval",
        "--alg",
        "ttw",
        "--alpha",
        "0",
        "--beta",
        "5",
        "--depth",
        "3",
        "--out",
        table.to_str().unwrap(),
        t,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let value = stdout(&o).trim().to_string();

    let o = gtsearch(&[
        "check", t, &value, "--alpha", "0", "--beta", "5", "--depth", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("satisfied\n"));

    let o = gtsearch(&["check-table", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("satisfied ")));

    // a reloaded table is used by the next call
    let o = gtsearch(&[
        "eval",
        "--alg",
        "ttw",
        "--table",
        table.to_str().unwrap(),
        "--depth",
        "3",
        t,
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", SAMPLE);
    let t = t.to_str().unwrap();

    let o = gtsearch(&["check", t, "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("satisfied"));
    assert_eq!(
        format::parse(lines.next().unwrap()).unwrap(),
        format::parse(SAMPLE).unwrap()
    );

    let o = gtsearch(&["check", t, "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "refuted\n");

    let o = gtsearch(&["check", t, "-3", "--depth", "0", "--guard", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "unknown\n");
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", SAMPLE);
    let t = t.to_str().unwrap();
    assert_eq!(
        gtsearch(&["eval", "--alg", "nope", t]).status.code(),
        Some(2)
    );
    assert_eq!(
        gtsearch(&["eval", "--alg", "ttw", "--alpha", "3", "--beta", "3", t])
            .status
            .code(),
        Some(2)
    );
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"eval":1,"color":1,"children":[{"eval":2,"color":1,"children":[]}]"#,
    );
    let o = gtsearch(&["eval", "--alg", "minimax", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(
        gtsearch(&["eval", "--alg", "minimax", "missing.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(gtsearch(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn expansions_prints_value_set() {
    let dir = tempfile::tempdir().unwrap();
    let leaf = write(
        dir.path(),
        "leaf.json",
        r#"{"eval":7,"color":-1,"children":[]}"#,
    );
    let o = gtsearch(&["expansions", leaf.to_str().unwrap(), "--depth", "0"]);
    assert_eq!(stdout(&o), "{-7}\n");
    let t = write(dir.path(), "t.json", SAMPLE);
    let o = gtsearch(&["expansions", t.to_str().unwrap(), "--depth", "1"]);
    assert_eq!(stdout(&o), "{1, 5}\n");
    let o = gtsearch(&[
        "expansions",
        t.to_str().unwrap(),
        "--depth",
        "0",
        "--guard",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn ttw_fuzz_is_clean() {
    let o = gtsearch(&["fuzz", "--alg", "ttw", "--trials", "10000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["violations"], 0);
    assert_eq!(summary["trials"], 10000);
}

#[test]
fn ttm_fuzz_writes_corpus_that_shrinks_and_renders() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus");
    let args = [
        "fuzz",
        "--alg",
        "ttm",
        "--trials",
        "20000",
        "--seed",
        "1",
        "--dup-prob",
        "0.4",
        "--out",
        out.to_str().unwrap(),
    ];
    let o = gtsearch(&args);
    assert_eq!(o.status.code(), Some(1));
    let files = corpus::corpus_files(&out).unwrap();
    assert!(!files.is_empty());
    let summary = fs::read_to_string(out.join(corpus::SUMMARY_FILE)).unwrap();
    assert_eq!(summary, stdout(&o));

    // a second run replays the stored violations first
    let again = gtsearch(&args);
    let log = String::from_utf8(again.stderr).unwrap();
    assert_eq!(log.matches(": reproduced").count(), files.len());

    let small = dir.path().join("small.json");
    let o = gtsearch(&[
        "shrink",
        files[0].to_str().unwrap(),
        "--out",
        small.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = corpus::read_violation(&small).unwrap();
    let original = corpus::read_violation(&files[0]).unwrap();
    assert!(v.tree.node_count() <= original.tree.node_count());

    let o = gtsearch(&["dot", small.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph tree {"));
    assert!(dot.contains("fillcolor=white"));
}

#[test]
fn counterexample_value_is_refuted_by_check() {
    let CounterexampleSearch::Found { violation, .. } =
        find_ttm_counterexample(100_000, DEFAULT_GUARD).unwrap()
    else {
        panic!("no counterexample")
    };
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", &format::serialize(&violation.tree));
    let (w, depth) = violation.probe();
    let o = gtsearch(&[
        "check",
        t.to_str().unwrap(),
        &violation.observed.to_string(),
        "--alpha",
        &w.alpha().to_string(),
        "--beta",
        &w.beta().to_string(),
        "--depth",
        &depth.to_string(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "refuted\n");
}

#[test]
fn dot_marks_duplicates_and_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let sub = r#"{"eval":2,"color":-1,"children":[{"eval":1,"color":1,"children":[]}]}"#;
    let t = write(
        dir.path(),
        "t.json",
        &format!(r#"{{"eval":0,"color":1,"children":[{sub},{sub}]}}"#),
    );
    let o = gtsearch(&["dot", t.to_str().unwrap(), "--depth", "1"]);
    let dot = stdout(&o);
    assert_eq!(dot.matches("peripheries=2").count(), 2);
    assert_eq!(dot.matches("dotted").count(), 2);
    assert!(dot.contains("fillcolor=gray"));
}

#[test]
fn negative_window_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", SAMPLE);
    let o = gtsearch(&[
        "eval",
        "--alg",
        "failhard",
        "--alpha",
        "-10",
        "--beta",
        "-4",
        t.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "-4\n");
}
