use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SOCRATES: &str = r#"(problem socrates
  (sort Thing)
  (const socrates Thing)
  (rel Human (Thing))
  (rel Mortal (Thing))
  (assumptions
    (forall (x Thing) (implies (Human x) (Mortal x)))
    (Human socrates))
  (queries
    (cf (not (Mortal socrates)) (not (Human socrates)))
    (entail (implies (not (Mortal socrates)) false))
    (cf (not (Mortal socrates)) false)))
"#;

fn cfreason(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfreason")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn cf_prints_the_witness() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "socrates.clp", SOCRATES);
    let out = cfreason(&["cf", &file, "--query", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("witness subset [0]"));
    assert!(text.contains("(forall (x Thing) (implies (Human x) (Mortal x)))"));
}

#[test]
fn absurd_counterfactual_exits_one() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "socrates.clp", SOCRATES);
    let out = cfreason(&["cf", &file, "--query", "3", "--timeout-ms", "5000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("NotProvedWithinBudget"));
}

#[test]
fn tautology_from_empty_assumptions() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "empty.clp", "(problem empty (rel P ()) (assumptions) (queries (entail (implies P P))))");
    let out = cfreason(&["prove", &file]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Proved"));
}

#[test]
fn json_output_is_one_document() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "socrates.clp", SOCRATES);
    let out = cfreason(&["cf", &file, "--json", "--order", "small-first"]);
    assert_eq!(out.status.code(), Some(1), "the absurd query is not proved");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert_eq!(results[0]["status"], "Proved");
    assert_eq!(results[0]["witness"]["indices"], serde_json::json!([0]));
    assert_eq!(results[1]["status"], "NotProvedWithinBudget");
    assert!(results[1]["counters"]["subsets_examined"].as_u64().unwrap() >= 1);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.clp", "(problem bad (assumptions (Undeclared x)) (queries))");
    assert_eq!(cfreason(&["prove", &bad]).status.code(), Some(2));
    let file = write(&dir, "socrates.clp", SOCRATES);
    assert_eq!(cfreason(&["prove", &file, "--query", "1"]).status.code(), Some(2));
    assert_eq!(cfreason(&["cf", &file, "--query", "9"]).status.code(), Some(2));
    assert_eq!(cfreason(&["cf", &file, "--order", "sideways"]).status.code(), Some(2));
    assert_eq!(cfreason(&["cf", "/nonexistent/file.clp"]).status.code(), Some(2));
}

#[test]
fn oracle_evaluates_propositional_queries() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "beliefs.clp",
        "(problem b (rel p ()) (rel q ()) (assumptions (not p) (implies p q)) (queries (cf p q) (cf p false)))",
    );
    let out = cfreason(&["oracle", &file, "--query", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("witness [1]"));
    assert_eq!(cfreason(&["oracle", &file, "--query", "2"]).status.code(), Some(1));
    let socrates = write(&dir, "socrates.clp", SOCRATES);
    assert_eq!(cfreason(&["oracle", &socrates]).status.code(), Some(2));
}

#[test]
fn dde_derives_both_clauses() {
    let a = cfreason(&["dde", "--which", "a"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).starts_with("C5a: (and (B me t"));
    let b = cfreason(&["dde", "--which", "b", "--json"]);
    assert_eq!(b.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
    assert_eq!(doc["clause"], "C5b");
    assert_eq!(doc["context"], "((B me t))");
    let ablated = cfreason(&["dde", "--which", "b", "--ablate", "--timeout-ms", "10000"]);
    assert_eq!(ablated.status.code(), Some(1));
}

fn tiny_dataset(dir: &Path, expected_cf: &str) {
    fs::write(dir.join("p.clp"), SOCRATES).unwrap();
    let manifest = format!(
        r#"{{"problems": [{{"file": "p.clp", "premises": 2, "expected": ["{expected_cf}", "Proved", "NotProvedWithinBudget"]}}]}}"#
    );
    fs::write(dir.join("manifest.json"), manifest).unwrap();
}

#[test]
fn bench_reports_mismatches() {
    let dir = TempDir::new().unwrap();
    tiny_dataset(dir.path(), "Proved");
    let d = dir.path().to_str().unwrap();
    let ok = cfreason(&["bench", d, "--timeout-ms", "5000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("Mean (s)"));
    tiny_dataset(dir.path(), "NotProvedWithinBudget");
    let bad = cfreason(&["bench", d, "--timeout-ms", "5000"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("MISMATCH"));
}

#[test]
fn shipped_dataset_validates() {
    let out = cfreason(&["bench", "--validate-only"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("16 problems"));
}

#[test]
fn validation_flags_a_satisfiable_antecedent() {
    let dir = TempDir::new().unwrap();
    tiny_dataset(dir.path(), "Proved");
    fs::write(
        dir.path().join("p.clp"),
        "(problem p (rel a ()) (rel b ()) (assumptions (implies a b)) (queries (cf a b) (entail (implies a false)) (cf a false)))",
    )
    .unwrap();
    fs::write(
        dir.path().join("manifest.json"),
        r#"{"problems": [{"file": "p.clp", "premises": 1, "expected": ["Proved", "Proved", "NotProvedWithinBudget"]}]}"#,
    )
    .unwrap();
    let out = cfreason(&["bench", dir.path().to_str().unwrap(), "--validate-only", "--timeout-ms", "2000"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("do not prove (not a)"), "{text}");
    assert!(text.contains("oracle says material-absurd is false"), "{text}");
}
