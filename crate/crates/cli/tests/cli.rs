//! End-to-end tests that drive the `mdlwb` binary: exit codes, report
//! shapes, the state-count guard, and byte-level determinism.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn mdlwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdlwb"))
        .args(args)
        .output()
        .expect("the binary should run")
}

fn mdlwb_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdlwb"))
        .args(args)
        .env(key, value)
        .output()
        .expect("the binary should run")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout should be one JSON document")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("the binary should exit normally")
}

#[test]
fn concept_checks_answer_with_the_exit_code() {
    let yes = mdlwb(&[
        "check-concept", "-m", "MI.json", "-w", "v1", "-d", "a", "-c", "exists dia r . A",
    ]);
    assert_eq!(code(&yes), 0);
    let doc = report(&yes);
    assert_eq!(doc["result"], Value::Bool(true));
    assert_eq!(doc["concept"], "exists dia r . A");
    assert_eq!(doc["rank"], 1);

    let no = mdlwb(&[
        "check-concept", "-m", "MJ.json", "-w", "w1", "-d", "a", "-c", "exists dia r . A",
    ]);
    assert_eq!(code(&no), 1);
    assert_eq!(report(&no)["result"], Value::Bool(false));
}

#[test]
fn unreadable_concept_text_is_a_usage_error() {
    let out = mdlwb(&["check-concept", "-m", "MI.json", "-w", "v1", "-d", "a", "-c", "exists r ."]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty(), "a parse failure should explain itself on stderr");
}

#[test]
fn unknown_worlds_are_semantic_errors() {
    let out = mdlwb(&["check-concept", "-m", "MI.json", "-w", "nowhere", "-d", "a", "-c", "A"]);
    assert_eq!(code(&out), 3);
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("nowhere"), "stderr should name the missing world: {text}");
}

#[test]
fn the_bundled_pair_is_bisimilar_at_every_depth() {
    let unbounded = mdlwb(&["bisim", "-m1", "MI.json", "-p1", "v1,a", "-m2", "MJ.json", "-p2", "w1,a"]);
    assert_eq!(code(&unbounded), 0);
    assert_eq!(report(&unbounded)["mode"], "unbounded");

    let depth_one = mdlwb(&[
        "bisim", "-m1", "MI.json", "-p1", "v1,a", "-m2", "MJ.json", "-p2", "w1,a", "--depth", "1",
    ]);
    assert_eq!(code(&depth_one), 0);
    assert_eq!(report(&depth_one)["depth"], 1);
}

#[test]
fn the_bundled_relation_is_a_bisimulation() {
    let out = mdlwb(&["verify-bisim", "-m1", "MI.json", "-m2", "MJ.json", "-r", "R.json"]);
    assert_eq!(code(&out), 0);
    let doc = report(&out);
    assert_eq!(doc["result"], "bisimulation");
    assert_eq!(doc["pairs"], 6);
    assert_eq!(doc["violation"], Value::Null);
}

#[test]
fn a_bad_relation_is_rejected_with_the_failing_clause() {
    let mut file = tempfile::NamedTempFile::new().expect("a temp file should open");
    // (v1, a) has A false in the left model; (w3, b) has A true in the right.
    write!(file, r#"[[["v1","a"],["w3","b"]]]"#).expect("the temp file should accept writes");
    let path = file.path().to_str().expect("the temp path should be text");

    let out = mdlwb(&["verify-bisim", "-m1", "MI.json", "-m2", "MJ.json", "-r", path]);
    assert_eq!(code(&out), 1);
    let doc = report(&out);
    assert_eq!(doc["result"], "violation");
    assert_eq!(doc["violation"]["clause"]["kind"], "atomic");
    assert_eq!(doc["violation"]["clause"]["concept"], "A");
}

#[test]
fn the_one_round_game_separates_the_bundled_pair() {
    let one = mdlwb(&[
        "ef", "-m1", "MI.json", "-p1", "v1,a", "-m2", "MJ.json", "-p2", "w1,a", "--rounds", "1",
    ]);
    assert_eq!(code(&one), 1);
    assert_eq!(report(&one)["result"], Value::Bool(false));

    let zero = mdlwb(&[
        "ef", "-m1", "MI.json", "-p1", "v1,a", "-m2", "MJ.json", "-p2", "w1,a", "--rounds", "0",
    ]);
    assert_eq!(code(&zero), 0);
}

#[test]
fn round_counts_above_the_cap_need_force() {
    let capped = mdlwb(&[
        "ef", "-m1", "MI.json", "-p1", "v1,a", "-m2", "MJ.json", "-p2", "w1,a", "--rounds", "5",
    ]);
    assert_eq!(code(&capped), 3);
    let text = String::from_utf8_lossy(&capped.stderr);
    assert!(text.contains("cap"), "the refusal should mention the cap: {text}");

    let forced = mdlwb(&[
        "ef", "-m1", "MI.json", "-p1", "v1,a", "-m2", "MJ.json", "-p2", "w1,a",
        "--rounds", "5", "--force",
    ]);
    assert_eq!(code(&forced), 1);
    assert_eq!(report(&forced)["result"], Value::Bool(false));
}

#[test]
fn characteristic_forms_render_with_their_atom_count() {
    let out = mdlwb(&["nf", "-m", "MI.json", "-w", "v1", "-d", "b", "--rank", "1", "--render"]);
    assert_eq!(code(&out), 0);
    let doc = report(&out);
    assert_eq!(doc["atom_count"], "5");
    let rendered = doc["rendered"].as_str().expect("the rendering should be text");
    assert!(rendered.contains("A & ~(exists r . A)"), "unexpected rendering: {rendered}");
    assert!(rendered.contains("dia A & dia ~A"), "unexpected rendering: {rendered}");
}

#[test]
fn characterization_finds_the_obvious_concept() {
    let out = mdlwb(&["characterize", "-f", "A(x)", "--rank", "0"]);
    assert_eq!(code(&out), 0);
    let doc = report(&out);
    assert_eq!(doc["concept"], "A");
    assert_eq!(doc["verdict"], "equivalent");
    assert_eq!(doc["models_scanned"], 4180);
}

#[test]
fn characterization_refutes_a_non_invariant_formula() {
    let out = mdlwb(&["characterize", "-f", "r(x,x)", "--rank", "1"]);
    assert_eq!(code(&out), 1);
    let doc = report(&out);
    assert_eq!(doc["verdict"], "counterexample");
    assert!(doc["counterexample"].is_object(), "the counterexample should be attached");
}

#[test]
fn enumeration_counts_and_streams_consistently() {
    let counted = mdlwb(&["enumerate", "--count"]);
    assert_eq!(code(&counted), 0);
    assert_eq!(report(&counted)["count"], "4180");

    let streamed = mdlwb(&["enumerate", "--max-worlds", "1", "--max-domain", "1"]);
    assert_eq!(code(&streamed), 0);
    let lines: Vec<&str> = std::str::from_utf8(&streamed.stdout)
        .expect("the stream should be text")
        .lines()
        .collect();
    assert_eq!(lines.len(), 4);
    for line in lines {
        let doc: Value = serde_json::from_str(line).expect("each line should be a model document");
        assert_eq!(doc["worlds"].as_array().map(Vec::len), Some(1));
    }
}

#[test]
fn identical_invocations_print_identical_bytes() {
    let first = mdlwb(&["verify", "st", "--samples", "3"]);
    let second = mdlwb(&["verify", "st", "--samples", "3"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let nf_first = mdlwb(&["nf", "-m", "MJ.json", "-w", "w2", "-d", "a", "--rank", "2"]);
    let nf_second = mdlwb(&["nf", "-m", "MJ.json", "-w", "w2", "-d", "a", "--rank", "2"]);
    assert_eq!(code(&nf_first), 0);
    assert_eq!(nf_first.stdout, nf_second.stdout);
}

#[test]
fn the_state_ceiling_comes_from_the_environment() {
    let refused = mdlwb_with_env(&["enumerate"], "MDLWB_MAX_STATES", "10");
    assert_eq!(code(&refused), 3);
    let text = String::from_utf8_lossy(&refused.stderr);
    assert!(text.contains("MDLWB_MAX_STATES"), "the refusal should name the ceiling: {text}");

    let forced = mdlwb_with_env(&["enumerate", "--force"], "MDLWB_MAX_STATES", "10");
    assert_eq!(code(&forced), 0);
}

#[test]
fn partial_unravellings_report_their_projection() {
    let out = mdlwb(&["unravel", "-m", "MI.json", "-d", "a", "--partial", "--radius", "1"]);
    assert_eq!(code(&out), 0);
    let doc = report(&out);
    assert_eq!(doc["mode"], "partial");
    let root = doc["root"].as_str().expect("the root should be named");
    assert_eq!(doc["rho"][root], "a", "the root should project to the start individual");
}

#[test]
fn the_role_graph_report_lists_edges_and_distances() {
    let plain = mdlwb(&["gaifman", "-m", "MI.json"]);
    assert_eq!(code(&plain), 0);
    let doc = report(&plain);
    assert_eq!(doc["individuals"], serde_json::json!(["a", "b"]));
    assert_eq!(doc["edges"], serde_json::json!([["a", "b"]]));
    assert_eq!(doc["forest"], Value::Bool(true));

    let from = mdlwb(&["gaifman", "-m", "MI.json", "--from", "a"]);
    let doc = report(&from);
    assert_eq!(doc["distances"]["a"], 0);
    assert_eq!(doc["distances"]["b"], 1);
}

#[test]
fn translations_run_in_both_directions() {
    let st = mdlwb(&["translate", "--st", "-c", "box A"]);
    assert_eq!(code(&st), 0);
    let doc = report(&st);
    assert_eq!(doc["mode"], "standard");
    assert!(doc["output"].as_str().unwrap().contains("box"));

    let two = mdlwb(&["translate", "--two-sorted", "-f", "box A(x)"]);
    assert_eq!(code(&two), 0);
    let doc = report(&two);
    assert_eq!(doc["mode"], "two-sorted");
    assert!(doc["output"].as_str().unwrap().contains("forall"));
}

#[test]
fn unknown_suites_and_help_use_the_usual_codes() {
    let unknown = mdlwb(&["verify", "nonsense"]);
    assert_eq!(code(&unknown), 2);

    let help = mdlwb(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(String::from_utf8_lossy(&help.stdout).contains("mdlwb"));
}
