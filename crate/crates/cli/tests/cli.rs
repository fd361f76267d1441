use std::path::PathBuf;
use std::process::{Command, Output};

use cerl_cli::commands;
use cerl_core::{corpus, Trace};

fn corpus_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn cerl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cerl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(name: &str) -> String {
    corpus_file(name).to_string_lossy().into_owned()
}

#[test]
fn corpus_files_match_the_built_in_nodes() {
    let files = [
        ("signal_order.node", corpus::signal_order_node()),
        ("exit_kill.node", corpus::exit_kill_node()),
        ("exit_kill1.node", corpus::exit_kill1_node()),
        ("mm.node", corpus::mm_node()),
    ];
    for (file, node) in files {
        assert_eq!(commands::load_node(&corpus_file(file)).unwrap(), node, "{file}");
    }
    assert_eq!(commands::load_program(&corpus_file("mm.cerl")).unwrap(), corpus::mm_program());
    let result = commands::load_program(&corpus_file("mm_result.cerl")).unwrap();
    assert_eq!(
        commands::eval_source(result, 100),
        commands::EvalReport::Finished { value: "[1, 2, 3]".into() }
    );
}

#[test]
fn eval_prints_the_mm_result() {
    let o = cerl(&["eval", &path("mm.cerl")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "[1, 2, 3]");
}

#[test]
fn eval_reports_fuel_exhaustion_by_exit_code() {
    let o = cerl(&["eval", &path("mm.cerl"), "--fuel", "2"]);
    assert_eq!(o.status.code(), Some(4));
    let o = cerl(&["--json", "eval", &path("mm.cerl"), "--fuel", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"], "out_of_fuel");
}

#[test]
fn explore_lists_both_results_for_pid_3_and_writes_the_lts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lts.json");
    let o = cerl(&["explore", &path("signal_order.node"), "--depth", "40", "--lts", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("#3 results: 'fst', 'snd'"), "{}", stdout(&o));
    let doc: cerl_core::LtsDoc = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc.states.len(), doc.states.iter().map(|s| s.id).max().unwrap() + 1);
    assert!(doc.truncated.is_empty());
}

#[test]
fn run_replays_the_exit_trace() {
    let o = cerl(&["run", &path("exit_kill.node"), "--trace", &path("traces/exit2.trace")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("['EXIT', #1, 'killed']"), "{}", stdout(&o));
}

#[test]
fn run_reports_the_failing_index() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("bad.trace");
    let mut t: Trace = commands::load_trace(&corpus_file("traces/exit2.trace")).unwrap();
    t.0.swap(0, 3);
    std::fs::write(&trace, serde_json::to_string(&t).unwrap()).unwrap();
    let o = cerl(&["--json", "run", &path("exit_kill.node"), "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["index"], 0);
}

#[test]
fn check_equiv_exit_codes() {
    let holds = cerl(&["check-equiv", &path("mm.node"), &path("mm_result.node")]);
    assert_eq!(holds.status.code(), Some(0), "{}", stdout(&holds));
    // A pending arrival is visible at once but leads past depth 1.
    let dir = tempfile::tempdir().unwrap();
    let pending = dir.path().join("pending.node");
    let doc = r#"{"processes": [{"pid": 1, "expr": "let X = 0 in X"}],
        "ether": [{"src": 2, "dst": 1, "signals": [{"kind": "message", "value": "'m'"}]}]}"#;
    std::fs::write(&pending, doc).unwrap();
    let pending = pending.to_str().unwrap();
    let unknown = cerl(&["check-equiv", pending, pending, "--depth", "1"]);
    assert_eq!(unknown.status.code(), Some(2), "{}", stdout(&unknown));
    let other = dir.path().join("other.node");
    std::fs::write(&other, doc.replace("'m'", "'n'")).unwrap();
    let fails = cerl(&["check-equiv", pending, other.to_str().unwrap()]);
    assert_eq!(fails.status.code(), Some(1), "{}", stdout(&fails));
}

#[test]
fn malformed_inputs_exit_with_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cerl");
    std::fs::write(&bad, "let X = in X").unwrap();
    let o = cerl(&["eval", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:"));
}

#[test]
fn props_runs_small_suites() {
    let o = cerl(&["props", "--cases", "20", "--seed", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS exit rule exclusivity"));
}
