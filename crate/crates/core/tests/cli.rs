use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ontopop(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontopop"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn fixture(dir: &Path, per_class: &str) {
    let out = ontopop(
        &["gen-fixture", "--out", "fx", "--per-class", per_class],
        dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn inspect_reports_dimension_and_vocabulary() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "20");
    let out = ontopop(&["inspect", "-c", "fx/config.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("dim=200 vocab=1000\n"), "{stdout}");
    assert!(stdout.contains("class0: 5 seeds, 5 in vocabulary"));
}

#[test]
fn inspect_lists_oov_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("v.txt"), "2 2\napple 1 0\npear 0.9 0.1\n").unwrap();
    fs::write(
        p.join("o.json"),
        r#"{"classes": [{"id": "fruit", "seeds": ["apple", "pear", "quince"]}]}"#,
    )
    .unwrap();
    let out = ontopop(
        &["inspect", "--embeddings", "v.txt", "--ontology", "o.json"],
        p,
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("dim=2 vocab=2"));
    assert!(
        stdout.contains("seed `quince` is out of vocabulary"),
        "{stdout}"
    );
}

#[test]
fn missing_inputs_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = ontopop(
        &[
            "inspect",
            "--embeddings",
            "nope.bin",
            "--ontology",
            "nope.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.bin"));
    let out = ontopop(&["populate", "-c", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = ontopop(&["gen-fixture", "--out", "x", "--classes", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_embeddings_are_runtime_failures() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("v.txt"), "2 3\napple 1 0 0\npear 0.9\n").unwrap();
    fs::write(
        p.join("o.json"),
        r#"{"classes": [{"id": "fruit", "seeds": ["apple"]}]}"#,
    )
    .unwrap();
    let out = ontopop(
        &[
            "inspect",
            "--embeddings",
            "v.txt",
            "--ontology",
            "o.json",
            "--format",
            "text",
        ],
        p,
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn populate_is_deterministic_and_leaves_inputs_alone() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fixture(p, "20");
    let before = fs::read(p.join("fx/ontology.json")).unwrap();
    for out_dir in ["run1", "run2"] {
        let out = ontopop(&["populate", "-c", "fx/config.toml", "-o", out_dir], p);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for file in [
        "ontology.json",
        "m1.tsv",
        "m2.tsv",
        "m3.tsv",
        "m4.tsv",
        "m5.tsv",
        "ensemble.tsv",
        "report.json",
        "report.txt",
    ] {
        assert_eq!(
            fs::read(p.join("run1").join(file)).unwrap(),
            fs::read(p.join("run2").join(file)).unwrap(),
            "{file}"
        );
    }
    assert_eq!(fs::read(p.join("fx/ontology.json")).unwrap(), before);

    let tsv = fs::read_to_string(p.join("run1/m1.tsv")).unwrap();
    for line in tsv.lines() {
        assert_eq!(line.split('\t').count(), 3, "{line}");
    }
}

#[test]
fn output_cannot_overwrite_the_input_ontology() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "5");
    let out = ontopop(
        &["populate", "-c", "fx/config.toml", "-o", "fx"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_corpus_gives_empty_population() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fixture(p, "5");
    fs::create_dir(p.join("empty")).unwrap();
    let out = ontopop(
        &[
            "populate",
            "-c",
            "fx/config.toml",
            "--corpus",
            "empty",
            "-o",
            "out",
        ],
        p,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no candidates"));
    assert_eq!(fs::read_to_string(p.join("out/ensemble.tsv")).unwrap(), "");
    let json = fs::read_to_string(p.join("out/ontology.json")).unwrap();
    assert!(!json.contains("\"instance\""));
}

#[test]
fn evaluate_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fixture(p, "20");
    let out = ontopop(&["evaluate", "-c", "fx/config.toml", "-o", "eval"], p);
    assert_eq!(out.status.code(), Some(0));
    let table = fs::read_to_string(p.join("eval/report.txt")).unwrap();
    for row in [
        "M1",
        "M2",
        "M3",
        "M4",
        "M5",
        "ensemble",
        "weights (validation F1)",
    ] {
        assert!(table.contains(row), "{row}");
    }
    let no_gold = ontopop(
        &[
            "evaluate",
            "--embeddings",
            "fx/embeddings.bin",
            "--ontology",
            "fx/ontology.json",
            "--corpus",
            "fx/corpus",
            "-o",
            "e2",
        ],
        p,
    );
    assert_eq!(no_gold.status.code(), Some(2));
}
