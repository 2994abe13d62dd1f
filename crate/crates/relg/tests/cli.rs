//! End-to-end runs of the `relg` binary over the bundled fixture files,
//! pinning output shapes and the exit-code contract: 0 all checks pass,
//! 1 a check failed with a replayable report, 2 malformed input.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(rel: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../fixtures");
    p.push(rel);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = Command::new(env!("CARGO_BIN_EXE_relg"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        status.code().expect("exit code"),
        String::from_utf8(stdout).expect("utf8 stdout"),
        String::from_utf8(stderr).expect("utf8 stderr"),
    )
}

#[test]
fn laws_modal_suite_on_f1_passes() {
    let (code, out, _) = run(&["laws", "--model", &fixture("models/f1.json"), "--suite", "modal"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("modal.join: holds"));
    assert!(out.contains("modal.bottom: holds"));
    assert!(out.contains("modal.continuity: holds"));
    assert!(out.contains("modal.subspace: holds"));
}

#[test]
fn check_proof_accepts_the_necessitation_corpus() {
    let (code, out, _) = run(&[
        "check-proof",
        "--theory",
        &fixture("theories/emp.thy"),
        "--proof",
        &fixture("proofs/nec.prf"),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("accepted\n"));
}

#[test]
fn eval_prints_the_diamond_extension() {
    let (code, out, _) = run(&[
        "eval",
        "--interp",
        &fixture("models/i1.json"),
        "--formula",
        "ctx x:U |- dia{x:U|P(x)}(x)",
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out, "a:{0}\n");
}

#[test]
fn failing_law_reports_carry_a_witness_block() {
    let (code, out, _) = run(&["laws", "--model", &fixture("models/f1.json")]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("optional.s4-idempotence: fails"));
    assert!(out.contains("  S1: a:{1}"));
    assert!(out.contains("  lhs: a:{}"));
    assert!(out.contains("  rhs: a:{0}"));
}

#[test]
fn reports_are_byte_identical_per_seed() {
    let laws = ["laws", "--model", &fixture("models/f3.json"), "--seed", "7"];
    assert_eq!(run(&laws), run(&laws));
    let maximal = [
        "counterpart",
        "--left",
        &fixture("harness/m.json"),
        "--right",
        &fixture("harness/n.json"),
        "--probes",
        &fixture("harness/probes.json"),
        "--maximal",
        "--format",
        "json",
    ];
    assert_eq!(run(&maximal), run(&maximal));
}

#[test]
fn json_reports_mirror_the_law_fields() {
    let (code, out, _) = run(&[
        "laws",
        "--model",
        &fixture("models/f1.json"),
        "--suite",
        "modal",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0, "{out}");
    let doc: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    assert_eq!(doc["version"], 1);
    let reports = doc["reports"].as_array().expect("reports array");
    assert_eq!(reports.len(), 4);
    for r in reports {
        assert!(r["law"].is_string());
        assert_eq!(r["status"], "holds");
        assert!(r["sampled"].is_boolean());
        assert!(r["witness"].is_null());
    }
    // A failing law serializes its witness with the same fields the text
    // block prints.
    let (code, out, _) = run(&[
        "laws",
        "--model",
        &fixture("models/f1.json"),
        "--suite",
        "optional",
        "--format",
        "json",
    ]);
    assert_eq!(code, 1);
    let doc: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    let failing = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["status"] == "fails")
        .expect("a failing law");
    let witness = &failing["witness"];
    assert!(witness["note"].is_string());
    assert!(witness["subobjects"].is_array());
}

#[test]
fn quotient_certifies_the_total_collapse() {
    let (code, out, _) = run(&[
        "quotient",
        "--model",
        &fixture("models/f1.json"),
        "--rel",
        &fixture("models/rel_total.json"),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("a: 0"));
    assert!(out.contains("quotient.map: holds"));
    assert!(out.contains("quotient.axiom: holds"));
    assert!(out.contains("quotient.kernel: holds"));
}

#[test]
fn quotient_rejects_a_non_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let rel = dir.path().join("rel.json");
    std::fs::write(&rel, r#"{"version":1,"pairs":{"a":[["0","1"]]}}"#).unwrap();
    let (code, _, err) = run(&[
        "quotient",
        "--model",
        &fixture("models/f1.json"),
        "--rel",
        rel.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("equivalence"), "{err}");
}

#[test]
fn check_model_verdicts_and_exit_codes() {
    let (code, out, _) = run(&[
        "check-model",
        "--interp",
        &fixture("models/i1.json"),
        "--theory",
        &fixture("theories/t1.thy"),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("axiom excluded_middle: holds"));
    assert!(out.contains("axiom p_is_terminal: holds"));
    let (code, out, _) = run(&[
        "check-model",
        "--interp",
        &fixture("models/i1.json"),
        "--theory",
        &fixture("theories/t1bad.thy"),
    ]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("axiom all_p: fails at a.0"));
}

#[test]
fn check_proof_rejects_mutations_at_the_cited_line() {
    let (code, out, _) = run(&[
        "check-proof",
        "--theory",
        &fixture("theories/axs.thy"),
        "--proof",
        &fixture("proofs/m01.prf"),
    ]);
    assert_eq!(code, 1, "{out}");
    assert!(out.ends_with("rejected at line 3\n"));
    let (code, out, _) = run(&[
        "check-proof",
        "--theory",
        &fixture("theories/axs.thy"),
        "--proof",
        &fixture("proofs/m08.prf"),
    ]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("side condition"));
    assert!(out.ends_with("rejected at line 2\n"));
}

#[test]
fn counterpart_seeded_and_maximal_runs() {
    let (code, out, _) = run(&[
        "counterpart",
        "--left",
        &fixture("harness/m.json"),
        "--right",
        &fixture("harness/n.json"),
        "--probes",
        &fixture("harness/probes.json"),
        "--seed-pairs",
        &fixture("harness/seed1.json"),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("U: (m, n)"));
    assert!(out.contains("counterpart.probes: holds"));
    let (code, out, _) = run(&[
        "counterpart",
        "--left",
        &fixture("harness/m.json"),
        "--right",
        &fixture("harness/n.json"),
        "--probes",
        &fixture("harness/probes.json"),
        "--maximal",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("maximal: yes"));
    // The model whose stored possibility is empty fails the probe
    // condition on the same pair.
    let (code, out, _) = run(&[
        "counterpart",
        "--left",
        &fixture("harness/mbad.json"),
        "--right",
        &fixture("harness/n.json"),
        "--probes",
        &fixture("harness/probes.json"),
        "--seed-pairs",
        &fixture("harness/seed1.json"),
    ]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("counterpart.probes: fails"));
    assert!(out.contains("(m)"), "witness names the failing tuple: {out}");
}

#[test]
fn repr_direction_and_edge_failure() {
    let (code, out, _) = run(&[
        "repr",
        "--models",
        &fixture("harness/m.json"),
        &fixture("harness/n.json"),
        "--edges",
        &fixture("harness/r1.json"),
        "--probes",
        &fixture("harness/probes.json"),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("counterpart {(m)} stored {(m)} violations {} gaps {}"));
    assert!(out.contains("direction: holds"));
    let (code, out, _) = run(&[
        "repr",
        "--models",
        &fixture("harness/mbad.json"),
        &fixture("harness/n.json"),
        "--edges",
        &fixture("harness/r1.json"),
        "--probes",
        &fixture("harness/probes.json"),
    ]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("edge MN: fails counterpart.probes"));
}

#[test]
fn repr_reports_gaps_without_edges() {
    let (code, out, _) = run(&[
        "repr",
        "--models",
        &fixture("harness/m.json"),
        &fixture("harness/n.json"),
        "--probes",
        &fixture("harness/probes.json"),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("counterpart {} stored {(m)} violations {} gaps {(m)}"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let v2 = dir.path().join("v2.json");
    std::fs::write(
        &v2,
        r#"{"version":2,"graph":{"vertices":["a"],"edges":[]}}"#,
    )
    .unwrap();
    let (code, _, err) = run(&["laws", "--model", v2.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("version 2"));

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "not json").unwrap();
    let (code, _, _) = run(&["laws", "--model", junk.to_str().unwrap()]);
    assert_eq!(code, 2);

    let bad_rule = dir.path().join("bad.prf");
    std::fs::write(&bad_rule, "1. ctx x:U |- P(x) ; Bogus\n").unwrap();
    let (code, _, err) = run(&[
        "check-proof",
        "--theory",
        &fixture("theories/axs.thy"),
        "--proof",
        bad_rule.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("Bogus"), "{err}");

    let (code, _, err) = run(&[
        "eval",
        "--interp",
        &fixture("models/i1.json"),
        "--formula",
        "ctx x:U |- dia{x:U|Q(x)}(x)",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1 col"), "{err}");

    let (code, _, _) = run(&["laws", "--model", "/nonexistent.json"]);
    assert_eq!(code, 2);

    let (code, _, _) = run(&["laws", "--bogus-flag"]);
    assert_eq!(code, 2);
}
