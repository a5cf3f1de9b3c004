use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;

use lscsim_core::corpus::parse_corpus;
use lscsim_core::evaluation::{self, CellId, EvaluationReport, IterationScore, PredictionSet};
use lscsim_core::rng::derive_seed;
use lscsim_core::simulator::{self, GoldRow, CORPUS1_FILE, CORPUS2_FILE, TESTSET_FILE};
use lscsim_core::synthetic::{self, SyntheticConfig};
use lscsim_core::AnnotatedCorpus;
use lscsim_embeddings::grid::{run_job, CellOutput};
use lscsim_embeddings::{GridInputs, PlainCorpus};

use crate::{InputError, PipelineConfig};

pub const PREDICTIONS_DIR: &str = "predictions";
pub const REPORT_FILE: &str = "report.tsv";
pub const SUMMARY_FILE: &str = "summary.tsv";
pub const ITERATIONS_FILE: &str = "iterations.tsv";

fn require(path: &Path, hint: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(InputError(format!("{} not found{hint}", path.display())).into())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn read_corpus(path: &Path) -> Result<AnnotatedCorpus> {
    require(path, "")?;
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_corpus(BufReader::new(file)).map_err(|e| InputError(format!("{}: {e}", path.display())).into())
}

pub fn cmd_simulate(config: &PipelineConfig) -> Result<()> {
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| InputError("no input corpus: pass --input or set `input` in the config".into()))?;
    let split = config.split_config()?;
    let corpus = read_corpus(input)?;
    let sim = simulator::simulate(&corpus, &split).map_err(|e| InputError(e.to_string()))?;
    fs::create_dir_all(&config.out).with_context(|| format!("cannot create {}", config.out.display()))?;
    simulator::export(&config.out, &corpus, &sim, config.seed)?;

    let testset: Vec<_> = sim.records.iter().filter(|r| r.in_testset).collect();
    let positives = testset.iter().filter(|r| r.scores.is_some_and(|s| s.binary == 1)).count();
    eprintln!(
        "simulate: {} sentences, {} targets, testset {} lemmas ({} binary positives) -> {}",
        corpus.len(),
        sim.plans.len(),
        testset.len(),
        positives,
        config.out.display()
    );
    Ok(())
}

fn read_plain(dir: &Path, name: &str, id: &str) -> Result<PlainCorpus> {
    let path = dir.join(name);
    require(&path, "; run `simulate` first")?;
    PlainCorpus::read(id, &path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_testset(dir: &Path) -> Result<Vec<GoldRow>> {
    let path = dir.join(TESTSET_FILE);
    require(&path, "; run `simulate` first")?;
    simulator::read_gold(&path).map_err(|e| InputError(e.to_string()).into())
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("cannot start worker pool")
}

fn write_cell(dir: &Path, cell: &CellOutput) -> Result<()> {
    let mut out = create(&dir.join(format!("{}.tsv", cell.id)))?;
    cell.predictions.write(&mut out)?;
    out.flush()?;
    let mut side = create(&dir.join(format!("{}.json", cell.id)))?;
    serde_json::to_writer_pretty(&mut side, &cell.provenance)?;
    writeln!(side)?;
    side.flush()?;
    Ok(())
}

/// Runs every grid job and writes one prediction file per cell. Returns
/// the ids of the written cells.
pub fn cmd_models(config: &PipelineConfig) -> Result<Vec<String>> {
    let spec = config.grid_spec()?;
    let c1 = read_plain(&config.out, CORPUS1_FILE, "corpus1")?;
    let c2 = read_plain(&config.out, CORPUS2_FILE, "corpus2")?;
    let testset = read_testset(&config.out)?;

    let (jobs, skipped) = spec.jobs();
    for s in &skipped {
        eprintln!("models: skipping {}+{}: {}", s.model, s.alignment, s.reason);
    }
    if jobs.is_empty() {
        eprintln!("models: warning: the grid is empty, nothing to do");
        return Ok(Vec::new());
    }

    let targets = testset.iter().map(|r| r.lemma.clone()).collect();
    let inputs = GridInputs::new(c1, c2, targets, spec.window);
    let dir = config.out.join(PREDICTIONS_DIR);
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let total = jobs.len();
    let pool = thread_pool(config.jobs)?;
    let results: Vec<Result<Vec<CellOutput>>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let start = Instant::now();
                let out = run_job(job, &spec, &inputs).with_context(|| format!("job {} failed", job.label()));
                eprintln!("models: {} ({:.1}s)", job.label(), start.elapsed().as_secs_f64());
                out
            })
            .collect()
    });

    let mut written = Vec::new();
    for result in results {
        for cell in result? {
            write_cell(&dir, &cell)?;
            written.push(cell.id);
        }
    }
    eprintln!("models: {total} jobs, {} prediction files in {}", written.len(), dir.display());
    Ok(written)
}

/// Prediction files in name order.
pub fn prediction_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    files.sort();
    Ok(files)
}

fn write_iterations(path: &Path, scores: &[(String, IterationScore)]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "file\tcell\titeration\trho\tap\tcoverage\tn")?;
    for (file, s) in scores {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
        writeln!(
            out,
            "{file}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.id.cell,
            s.id.iteration,
            fmt(s.rho.map(|r| r.rho)),
            fmt(s.ap.map(|a| a.ap)),
            fmt(s.rho.map(|r| r.coverage)),
            s.rho.map_or(0, |r| r.n)
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Scores every prediction file against the testset, adds the baselines
/// and writes the full report and the summary table. Reads nothing but
/// the testset and the prediction files.
pub fn cmd_evaluate(config: &PipelineConfig, baselines_only: bool) -> Result<EvaluationReport> {
    let testset = read_testset(&config.out)?;
    let dir = config.out.join(PREDICTIONS_DIR);
    let files = if baselines_only { Vec::new() } else { prediction_files(&dir)? };
    if files.is_empty() && !baselines_only {
        return Err(InputError(format!("no prediction files in {}; run `models` first", dir.display())).into());
    }

    let mut scores = Vec::with_capacity(files.len());
    for path in &files {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let predictions = PredictionSet::read(path, stem.clone()).map_err(|e| InputError(e.to_string()))?;
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        scores.push((name, evaluation::score_predictions(CellId::parse(&stem), &predictions, &testset)));
    }

    let trials = config.evaluation.trials;
    let baselines = evaluation::baselines(&testset, trials, derive_seed(config.seed, "random-baseline"));
    let plain: Vec<IterationScore> = scores.iter().map(|s| s.1.clone()).collect();
    let report = evaluation::aggregate(&plain, baselines);

    let mut full = create(&config.out.join(REPORT_FILE))?;
    report.write_full(&mut full)?;
    full.flush()?;
    let mut summary = create(&config.out.join(SUMMARY_FILE))?;
    report.write_summary(&mut summary)?;
    summary.flush()?;
    write_iterations(&config.out.join(ITERATIONS_FILE), &scores)?;

    let mut table = Vec::new();
    report.write_summary(&mut table)?;
    print!("{}", String::from_utf8_lossy(&table));
    eprintln!(
        "evaluate: {} prediction files, {} cells, testset {} lemmas",
        files.len(),
        report.cells.len(),
        testset.len()
    );
    Ok(report)
}

pub fn cmd_all(config: &PipelineConfig) -> Result<EvaluationReport> {
    // fail on a missing input before any stage writes output
    if let Some(input) = &config.input {
        require(input, "")?;
    }
    cmd_simulate(config)?;
    cmd_models(config)?;
    cmd_evaluate(config, false)
}

/// Writes a generated sense-annotated corpus in the input format.
pub fn cmd_synth(output: &Path, config: &SyntheticConfig) -> Result<()> {
    let corpus = synthetic::generate(config);
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    let mut out = create(output)?;
    corpus.write_canonical(&mut out)?;
    out.flush()?;
    eprintln!("synth: {} sentences -> {}", corpus.len(), output.display());
    Ok(())
}
