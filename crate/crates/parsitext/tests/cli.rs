//! End-to-end tests of the `parsitext` binary: every subcommand and file
//! format named on the CLI surface.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parsitext"))
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn normalize_reads_stdin_lines() {
    let out = run_with_stdin(&["normalize"], "بخش ها\nكتاب\n");
    assert_eq!(stdout_of(&out), "بخش\u{200C}ها\nکتاب\n");
}

#[test]
fn normalize_fenglish_flag() {
    let out = run_with_stdin(&["normalize", "--fenglish"], "salam\n");
    assert_eq!(stdout_of(&out), "سلام\n");
}

#[test]
fn normalize_honors_custom_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.tsv");
    // map LATIN SMALL LETTER A to LATIN SMALL LETTER B
    std::fs::write(&table, "0061\t0062\n").unwrap();
    let affixes = dir.path().join("affixes.txt");
    std::fs::write(&affixes, "").unwrap();
    let out = run_with_stdin(
        &[
            "normalize",
            "--table",
            table.to_str().unwrap(),
            "--affixes",
            affixes.to_str().unwrap(),
        ],
        "banana\n",
    );
    assert_eq!(stdout_of(&out), "bbnbnb\n");
}

#[test]
fn tokenize_stems_and_filters() {
    let out = run_with_stdin(&["tokenize"], "این بخشها و کتاب‌ها!\n");
    assert_eq!(stdout_of(&out), "بخش کتاب\n");
    let raw = run_with_stdin(&["tokenize", "--no-stem"], "بخشها\n");
    assert_eq!(stdout_of(&raw), "بخش\u{200C}ها\n");
}

fn write_dataset(path: &Path) {
    let mut rows = String::from("text\tlabel\n");
    for i in 0..30 {
        if i % 2 == 0 {
            rows.push_str("فیلم خوب و عالی بود\tpos\n");
        } else {
            rows.push_str("داستان بد و ضعیف بود\tneg\n");
        }
        let _ = i;
    }
    std::fs::write(path, rows).unwrap();
}

#[test]
fn featurize_emits_matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.tsv");
    write_dataset(&data);
    let out = bin()
        .args(["featurize", "--data", data.to_str().unwrap(), "--unit", "word", "--n", "1"])
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let header = text.lines().next().unwrap();
    assert_eq!(header, "30 6 raw-count");
    let with_tfidf = bin()
        .args(["featurize", "--data", data.to_str().unwrap(), "--tfidf"])
        .output()
        .unwrap();
    assert!(stdout_of(&with_tfidf).lines().next().unwrap().ends_with("tfidf"));
}

#[test]
fn train_evaluate_tune_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.tsv");
    write_dataset(&data);
    // multinomial NB needs non-negative features, so PCA is off here
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"features": {"pca_ratio": null}}"#).unwrap();
    let model_dir = dir.path().join("model");
    let trained = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "train",
            "--data",
            data.to_str().unwrap(),
            "--learner",
            "mnb",
            "--out",
            model_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    stdout_of(&trained);
    assert!(model_dir.join("model.json").exists());
    assert!(model_dir.join("pipeline.json").exists());

    let eval = bin()
        .args([
            "evaluate",
            "--data",
            data.to_str().unwrap(),
            "--model-dir",
            model_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&eval)).unwrap();
    assert_eq!(report["n"], 30);
    assert!(report["f1"].as_f64().unwrap() > 0.99);

    let tuned = bin()
        .args([
            "tune-threshold",
            "--data",
            data.to_str().unwrap(),
            "--model-dir",
            model_dir.to_str().unwrap(),
            "--recall",
            "0.9",
        ])
        .output()
        .unwrap();
    let choice: serde_json::Value = serde_json::from_str(&stdout_of(&tuned)).unwrap();
    assert!(choice["recall"].as_f64().unwrap() >= 0.9);
}

#[test]
fn cv_and_learning_curve_commands() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.tsv");
    write_dataset(&data);
    let cv = bin()
        .args([
            "cv",
            "--data",
            data.to_str().unwrap(),
            "--learner",
            "gnb",
            "--k",
            "3",
        ])
        .output()
        .unwrap();
    let result: serde_json::Value = serde_json::from_str(&stdout_of(&cv)).unwrap();
    assert_eq!(result["k"], 3);
    assert_eq!(result["per_fold"].as_array().unwrap().len(), 3);

    let curve = bin()
        .args([
            "learning-curve",
            "--data",
            data.to_str().unwrap(),
            "--learner",
            "gnb",
            "--fractions",
            "0.5,1.0",
        ])
        .output()
        .unwrap();
    let text = stdout_of(&curve);
    assert!(text.starts_with("size,train,val\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn synth_then_run_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    let synth = bin()
        .args(["synth", "--n", "100", "--out", corpus.to_str().unwrap()])
        .output()
        .unwrap();
    stdout_of(&synth);
    let text = std::fs::read_to_string(&corpus).unwrap();
    assert!(text.starts_with("id\ttext\tlabel\n"));
    assert_eq!(text.lines().count(), 101);

    let out_dir = dir.path().join("exp");
    let run = bin()
        .args([
            "run",
            "--data",
            corpus.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--svg",
        ])
        .output()
        .unwrap();
    stdout_of(&run);
    for artifact in [
        "model.json",
        "report.json",
        "roc.csv",
        "learning_curve.csv",
        "config.resolved.json",
        "roc.svg",
        "learning_curve.svg",
    ] {
        assert!(out_dir.join(artifact).exists(), "{artifact}");
    }
    let roc = std::fs::read_to_string(out_dir.join("roc.csv")).unwrap();
    assert!(roc.starts_with("fpr,tpr,threshold\n"));
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"learner": {"kind": "mnb"}, "features": {"pca_ratio": null}, "eval": {"learning_curve_fractions": []}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("exp");
    let run = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "run",
            "--synth",
            "60",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    stdout_of(&run);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["model_kind"], "multinomial_nb");
    assert!(report["features"]["pca_components"].is_null());
}

#[test]
fn errors_exit_nonzero() {
    let missing = bin()
        .args(["run", "--data", "/nonexistent.tsv", "--out", "/tmp/nope"])
        .output()
        .unwrap();
    assert!(!missing.status.success());
    assert!(!missing.stderr.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "text\tlabel\nok\tmaybe\n").unwrap();
    let unmappable = bin()
        .args(["train", "--data", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!unmappable.status.success());
    let err = String::from_utf8_lossy(&unmappable.stderr);
    assert!(err.contains("unmappable label"), "stderr: {err}");
}
