use std::process::{Command, Output};

use synqc::compiler::Circuit;
use synqc::lexicon::Lexicon;
use synqc::pipeline::{self, CompileOptions, Form, Rewrite};
use synqc::simulator::{simulate, MeaningState};
use synqc::ParameterStore;

const PERSIAN: &str = "Sara ketab ra kharid";
const ENGLISH: &str = "Sara bought the book";

fn synqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synqc")).env_remove("SYNQC_LEXICON").args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn parse_exit_codes() {
    let ok = synqc(&["parse", PERSIAN]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["cups"].as_array().unwrap().len(), 3);
    let en = synqc(&["parse", ENGLISH]);
    assert_eq!(stdout_json(&en)["cups"].as_array().unwrap().len(), 3);
    let bad = synqc(&["parse", "Sara Sara"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout_json(&bad)["grammatical"], false);
    assert_eq!(synqc(&["parse", "Sara reads"]).status.code(), Some(2));
    assert_eq!(synqc(&["diagram", "Sara Sara"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(synqc(&["train", "--method", "newton"]).status.code(), Some(2));
    assert_eq!(synqc(&["compile", PERSIAN, "--form", "zx"]).status.code(), Some(2));
    assert_eq!(synqc(&["compile", PERSIAN, "--qubits", "q=1"]).status.code(), Some(2));
    assert_eq!(synqc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn compile_forms_have_the_expected_width() {
    for (form, n) in [("grammar-meaning", 4), ("choi", 3)] {
        let out = synqc(&["compile", PERSIAN, "--form", form]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout_json(&out)["n_qubits"], n);
    }
    let wide = synqc(&["compile", PERSIAN, "--rewrite", "none", "--qubits", "n=2,s=1"]);
    assert_eq!(stdout_json(&wide)["n_qubits"], 7);
}

#[test]
fn compiled_file_simulates_like_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    let params = dir.path().join("p.json");
    let file_s = file.to_str().unwrap();
    assert!(synqc(&["compile", ENGLISH, "--form", "choi", "--out", file_s]).status.success());
    let lex = Lexicon::builtin();
    let c = pipeline::compile(&lex, ENGLISH, &CompileOptions::new(&lex, Form::Choi, Rewrite::Snake)).unwrap();
    let from_file: Circuit = serde_json::from_slice(&std::fs::read(&file).unwrap()).unwrap();
    assert_eq!(from_file, c);

    let store = ParameterStore::random(&c.params, 21);
    std::fs::write(&params, serde_json::to_vec(&store).unwrap()).unwrap();
    let out = synqc(&["simulate", "--circuit", file_s, "--params", params.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cli: MeaningState = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cli, simulate(&c, &store).unwrap());

    let seeded: MeaningState = serde_json::from_slice(&synqc(&["simulate", "--circuit", file_s, "--seed", "21"]).stdout).unwrap();
    assert_eq!(seeded, simulate(&c, &ParameterStore::random(&c.params, 21)).unwrap());
}

#[test]
fn compare_reports_fidelity() {
    let same = synqc(&["compare", PERSIAN, PERSIAN, "--seed", "3"]);
    assert_eq!(same.status.code(), Some(0));
    let f = stdout_json(&same)["fidelity"].as_f64().unwrap();
    assert!((f - 1.0).abs() < 1e-12);
    let a = synqc(&["compare", PERSIAN, ENGLISH, "--seed", "3"]);
    let b = synqc(&["compare", PERSIAN, ENGLISH, "--seed", "4"]);
    assert_ne!(a.stdout, b.stdout);
    assert_eq!(a.stdout, synqc(&["compare", PERSIAN, ENGLISH, "--seed", "3"]).stdout);
}

#[test]
fn trained_params_make_the_pair_synonymous() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    let trace = dir.path().join("t.json");
    let out = synqc(&[
        "train",
        "--out-params",
        params.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("final loss"));
    let entries: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(&trace).unwrap()).unwrap();
    assert!(entries.len() > 1);
    let cmp = synqc(&["compare", PERSIAN, ENGLISH, "--params", params.to_str().unwrap()]);
    assert_eq!(cmp.status.code(), Some(0));
    assert!(stdout_json(&cmp)["fidelity"].as_f64().unwrap() >= 0.99);
}

#[test]
fn converged_task_stops_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.json");
    std::fs::write(&pairs, format!(r#"[{{"a": "{PERSIAN}", "b": "{PERSIAN}"}}]"#)).unwrap();
    let out = synqc(&["train", "--pairs", pairs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("final loss: 0.0") && text.contains("evaluations: 1 of"), "{text}");
}

#[test]
fn lexicon_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lex.json");
    let mut lex = Lexicon::builtin();
    lex.words.retain(|w| w.language == "en");
    lex.pairs.clear();
    std::fs::write(&path, serde_json::to_vec(&lex).unwrap()).unwrap();
    let run = |envd: bool, args: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_synqc"));
        cmd.env_remove("SYNQC_LEXICON");
        if envd {
            cmd.env("SYNQC_LEXICON", &path);
        }
        cmd.args(args).output().unwrap()
    };
    assert_eq!(run(true, &["parse", PERSIAN]).status.code(), Some(2));
    assert_eq!(run(false, &["parse", PERSIAN]).status.code(), Some(0));
    assert_eq!(run(false, &["--lexicon", path.to_str().unwrap(), "parse", PERSIAN]).status.code(), Some(2));
}

#[test]
fn export_formats() {
    let qasm = synqc(&["export", PERSIAN, "--form", "choi", "--format", "qasm"]);
    let text = String::from_utf8(qasm.stdout).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];"));
    assert!(text.contains("measure q[2] -> c[1]; // postselect 0"));
    let dot = String::from_utf8(synqc(&["export", ENGLISH, "--format", "dot"]).stdout).unwrap();
    assert!(dot.starts_with("digraph") || dot.starts_with("graph"), "{dot}");
}
