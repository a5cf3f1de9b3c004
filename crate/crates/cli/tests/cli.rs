use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const PLANT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/plant.tsv");

fn lscsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lscsim")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = lscsim(args);
    assert!(out.status.success(), "lscsim {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

/// A small generated corpus, split into `<dir>/out`.
fn simulated(dir: &Path) -> PathBuf {
    let corpus = dir.join("corpus.tsv");
    let out = dir.join("out");
    ok(&["--seed", "3", "synth", "--small", "--output", s(&corpus)]);
    ok(&[
        "--seed", "3", "--out", s(&out), "simulate", "--input", s(&corpus), "--target-min", "20", "--target-max",
        "400", "--min-freq", "5",
    ]);
    out
}

/// `(lemma, pos, graded)` of every testset row.
fn testset(out: &Path) -> Vec<(String, String, String)> {
    fs::read_to_string(out.join("testset.tsv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].to_string(), f[1].to_string(), f[2].to_string())
        })
        .collect()
}

fn report_row(out: &Path, cell: &str) -> Vec<String> {
    let report = fs::read_to_string(out.join("report.tsv")).unwrap();
    let line = report.lines().find(|l| l.split('\t').next() == Some(cell)).unwrap();
    line.split('\t').map(str::to_string).collect()
}

#[test]
fn simulate_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            ok(&["--out", s(&out), "simulate", "--input", PLANT, "--target-min", "2", "--target-max", "10", "--min-freq", "1"]);
            files_under(&out)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let log = String::from_utf8(runs[0][Path::new("split.log.tsv")].clone()).unwrap();
    assert!(log.contains("target:plant/NOUN"), "{log}");
    let c1 = String::from_utf8(runs[0][Path::new("corpus1.txt")].clone()).unwrap();
    let c2 = String::from_utf8(runs[0][Path::new("corpus2.txt")].clone()).unwrap();
    assert_eq!(c1.lines().count() + c2.lines().count(), 5);
}

#[test]
fn missing_input_exits_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere.tsv");
    let out = lscsim(&["--out", s(&dir.path().join("out")), "all", "--input", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nowhere.tsv"), "{stderr}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn malformed_corpus_exits_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.tsv");
    fs::write(&corpus, "s1\tplant|plant|NOUN|a%1;a%2\n").unwrap();
    let out = lscsim(&["--out", s(&dir.path().join("out")), "simulate", "--input", s(&corpus)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn one_prediction_file_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulated(dir.path());
    ok(&[
        "--out", s(&out), "models", "--models", "SGNS", "--alignments", "OP", "--measures", "CD", "--dims", "30",
        "--iterations", "5", "--epochs", "1",
    ]);
    let mut names: Vec<String> = fs::read_dir(out.join("predictions"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".tsv"))
        .collect();
    names.sort();
    let expected: Vec<String> = (1..=5).map(|i| format!("SGNS+OP+CD+d30+i{i}.tsv")).collect();
    assert_eq!(names, expected);
    let provenance: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("predictions/SGNS+OP+CD+d30+i3.json")).unwrap()).unwrap();
    assert_eq!(provenance["iteration"], "3");
    assert_eq!(provenance["epochs"], "1");
}

#[test]
fn empty_grid_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulated(dir.path());
    let config = dir.path().join("run.toml");
    fs::write(&config, "[grid]\nmodels = []\n").unwrap();
    let result = ok(&["--config", s(&config), "--out", s(&out), "models"]);
    assert!(String::from_utf8_lossy(&result.stderr).contains("empty"));
    assert!(!out.join("predictions").exists());
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulated(dir.path());
    let mut runs = Vec::new();
    for jobs in ["1", "2"] {
        ok(&[
            "--out", s(&out), "--jobs", jobs, "models", "--models", "PPMI,SVD,SGNS", "--dims", "10", "--iterations",
            "2", "--epochs", "1", "--k-nn", "5",
        ]);
        runs.push(files_under(&out.join("predictions")));
        fs::remove_dir_all(out.join("predictions")).unwrap();
    }
    assert_eq!(runs[0], runs[1]);
    assert!(runs[0].len() > 10);
}

#[test]
fn gold_as_prediction_correlates_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulated(dir.path());
    let rows = testset(&out);
    assert!(rows.len() >= 5);
    fs::create_dir_all(out.join("predictions")).unwrap();
    let gold: String = rows.iter().map(|(l, p, g)| format!("{l}\t{p}\t{g}\n")).collect();
    fs::write(out.join("predictions/GOLD.tsv"), gold).unwrap();
    let constant: String = rows.iter().map(|(l, p, _)| format!("{l}\t{p}\t0.5\n")).collect();
    fs::write(out.join("predictions/CONST.tsv"), constant).unwrap();
    ok(&["--out", s(&out), "evaluate", "--trials", "100"]);

    let gold = report_row(&out, "GOLD");
    assert_eq!(gold[3], "1.000000");
    assert_eq!(gold[5], "1.000000", "coverage");
    let constant = report_row(&out, "CONST");
    assert_eq!(constant[3], "0.000000");
    assert_eq!(constant[6], "1", "degenerate flag");
}

#[test]
fn baselines_only_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulated(dir.path());
    let result = ok(&["--out", s(&out), "evaluate", "--baselines-only", "--trials", "100"]);
    let summary = fs::read_to_string(out.join("summary.tsv")).unwrap();
    let families: Vec<&str> = summary.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(families, ["POLY", "FREQ", "RAND"]);
    assert_eq!(String::from_utf8_lossy(&result.stdout), summary);
}

#[test]
fn evaluate_without_predictions_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulated(dir.path());
    let result = lscsim(&["--out", s(&out), "evaluate"]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("run `models` first"));
}

#[test]
fn models_before_simulate_fails() {
    let dir = tempfile::tempdir().unwrap();
    let result = lscsim(&["--out", s(dir.path()), "models"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    ok(&["--seed", "3", "synth", "--small", "--output", s(&corpus)]);
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "input = \"corpus.tsv\"\nout = \"from-config\"\n[split]\ntarget_min = 20\ntarget_max = 400\nmin_freq = 100000\n",
    )
    .unwrap();

    ok(&["--config", s(&config), "simulate"]);
    assert!(testset(&dir.path().join("from-config")).is_empty());

    let out = dir.path().join("from-flag");
    ok(&["--config", s(&config), "--out", s(&out), "simulate", "--min-freq", "5"]);
    assert!(!testset(&out).is_empty());
}

#[test]
fn unknown_config_key_exits_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "[grid]\nmodel = [\"SGNS\"]\n").unwrap();
    let result = lscsim(&["--config", s(&config), "evaluate"]);
    assert_eq!(result.status.code(), Some(2));
}
