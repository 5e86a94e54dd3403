use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_textmerge")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const REBASE: &str = r#"{"id":"base","parents":[],"files":{"f":"b\n"},"ts":1}
{"id":"a1","parents":["base"],"files":{"f":"b\na\n"},"ts":2}
{"id":"a2","parents":["a1"],"files":{"f":"a\n"},"ts":3}
{"id":"b1","parents":["base"],"files":{"f":"b\nb\n"},"ts":4}
{"id":"b2","parents":["b1"],"files":{"f":"b\n"},"ts":5}
"#;

const CRISSCROSS: &str = r#"{"id":"r","parents":[],"files":{"f":"1\n2\n3\n"},"ts":1}
{"id":"x","parents":["r"],"files":{"f":"1x\n2\n3\n"},"ts":2}
{"id":"y","parents":["r"],"files":{"f":"1\n2\n3y\n"},"ts":3}
{"id":"m1","parents":["x","y"],"files":{"f":"1x\n2\n3y\n"},"ts":4}
{"id":"m2","parents":["y","x"],"files":{"f":"1x\n2\n3y\n"},"ts":5}
{"id":"p","parents":["m1"],"files":{"f":"1x\n2p\n3y\n"},"ts":6}
{"id":"q","parents":["m2"],"files":{"f":"1x\n2\n3y\nq\n"},"ts":7}
"#;

#[test]
fn identical_files_exit_zero_silently() {
    let sb = Sandbox::new();
    let a = sb.file("a", "x\ny\n");
    let out = run(&["diff", s(&a), s(&a)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
}

#[test]
fn diff_prints_headers_and_hunks() {
    let sb = Sandbox::new();
    let a = sb.file("a", "x\ny\nz\n");
    let b = sb.file("b", "x\nY\nz\n");
    let out = run(&["diff", s(&a), s(&b), "--verify"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with(&format!("--- {}\n+++ {}\n@@ -1,3 +1,3 @@\n", s(&a), s(&b))));
    assert!(text.contains("-y\n+Y\n"));
}

#[test]
fn histogram_and_patience_differ_on_reordered_lines() {
    let sb = Sandbox::new();
    let old: String = "abcdefghXYZ".chars().map(|c| format!("{c}\n")).collect();
    let new: String = "XYZacegbdfh".chars().map(|c| format!("{c}\n")).collect();
    let (a, b) = (sb.file("old", &old), sb.file("new", &new));
    let count = |alg: &str| {
        let out = run(&["diff", s(&a), s(&b), "--algorithm", alg, "--verify"]);
        assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
        stdout(&out).lines().skip(2).filter(|l| l.starts_with('+') || l.starts_with('-')).count()
    };
    assert!(count("patience") < count("histogram"));
    assert!(count("minimal") <= count("patience"));
}

#[test]
fn minimal_verify_agrees_with_oracle() {
    let sb = Sandbox::new();
    let a = sb.file("a", "a\nb\nc\na\nb\nb\na\n");
    let b = sb.file("b", "c\nb\na\nb\na\nc\n");
    let out = run(&["diff", s(&a), s(&b), "--algorithm", "minimal", "--verify"]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn merge_file_reports_conflicts() {
    let sb = Sandbox::new();
    let o = sb.file("o", "a\nb\na\nb\n");
    let l = sb.file("l", "a\nb\na\nb\na\nb\n");
    let r = sb.file("r", "a\nb\na\nb\nc\n");
    let out = run(&["merge-file", s(&l), s(&o), s(&r), "--labels", "mine,old,theirs"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "a\nb\na\nb\n<<<<<<< mine\na\nb\n=======\nc\n>>>>>>> theirs\n");
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("1 conflict"));
}

#[test]
fn merge_file_takes_the_only_changed_side() {
    let sb = Sandbox::new();
    let o = sb.file("o", "1\n2\n3\n");
    let r = sb.file("r", "1\n2b\n3\nextra\n");
    let out = run(&["merge-file", s(&o), s(&o), s(&r)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\n2b\n3\nextra\n");
}

#[test]
fn merge_file_diff3_needs_no_zealous_refinement() {
    let sb = Sandbox::new();
    let o = sb.file("o", "x\n");
    let l = sb.file("l", "l\n");
    let r = sb.file("r", "r\n");
    let out = run(&["merge-file", s(&l), s(&o), s(&r), "--style", "diff3"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("||||||| base\nx\n"));
    let out = run(&["merge-file", s(&l), s(&o), s(&r), "--style", "diff3", "--zealous"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn bad_flags_and_missing_files_exit_three() {
    assert_eq!(code(&run(&["diff", "--algorithm", "nope", "a", "b"])), 3);
    assert_eq!(code(&run(&["diff", "/nonexistent/a", "/nonexistent/b"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 3);
}

#[test]
fn graph_merge_is_commutative() {
    let sb = Sandbox::new();
    let g = sb.file("g.jsonl", REBASE);
    let ab = json(&run(&["graph", "merge", s(&g), "a1", "b1"]));
    let ba = json(&run(&["graph", "merge", s(&g), "b1", "a1"]));
    assert_eq!(ab["result"], "conflict");
    assert_eq!(ab["report"]["conflicts"][0]["conflicts"], ba["report"]["conflicts"][0]["conflicts"]);
}

#[test]
fn crisscross_builds_a_virtual_base() {
    let sb = Sandbox::new();
    let g = sb.file("g.jsonl", CRISSCROSS);
    let out = run(&["graph", "merge", s(&g), "p", "q"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&out);
    assert_eq!(v["result"], "merged");
    assert_eq!(v["tree"]["f"], "1x\n2p\n3y\nq\n");
    assert_eq!(v["stats"]["virtual_bases"], 1);
}

#[test]
fn fast_forward_is_reported() {
    let sb = Sandbox::new();
    let g = sb.file("g.jsonl", REBASE);
    let v = json(&run(&["graph", "merge", s(&g), "base", "a2"]));
    assert_eq!(v["result"], "fast-forward");
    assert_eq!(v["target"], "a2");
}

#[test]
fn rebase_depends_on_direction() {
    let sb = Sandbox::new();
    let g = sb.file("g.jsonl", REBASE);
    let out = run(&["graph", "rebase", s(&g), "a2", "b2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["trees"].as_array().unwrap().last().unwrap()["f"], "a\n");
    let out = run(&["graph", "rebase", s(&g), "b2", "a2"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["pick"], 1);
}

#[test]
fn cherry_pick_and_revert() {
    let sb = Sandbox::new();
    let g = sb.file("g.jsonl", CRISSCROSS);
    let v = json(&run(&["graph", "cherry-pick", s(&g), "q", "p"]));
    assert_eq!(v["result"], "clean");
    assert_eq!(v["tree"]["f"], "1x\n2p\n3y\nq\n");
    let v = json(&run(&["graph", "revert", s(&g), "x", "m1"]));
    assert_eq!(v["tree"]["f"], "1\n2\n3y\n");
}

#[test]
fn expo_demo_reports_each_size() {
    let out = run(&["graph", "expo-demo", "--from", "0", "--to", "3"]);
    assert_eq!(code(&out), 0);
    let calls: Vec<u64> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["merge_calls"].as_u64().unwrap())
        .collect();
    assert_eq!(calls, [1, 3, 7, 15]);
}

#[test]
fn malformed_scripts_exit_three() {
    let sb = Sandbox::new();
    let g = sb.file("g.jsonl", "{\"id\":\"a\",\"parents\":[\"ghost\"],\"files\":{},\"ts\":1}\n");
    let out = run(&["graph", "merge", s(&g), "a", "a"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ghost"));
    let g = sb.file("h.jsonl", "not json\n");
    assert_eq!(code(&run(&["graph", "rebase", s(&g), "a", "b"])), 3);
}
