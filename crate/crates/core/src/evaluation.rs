//! Scoring change predictions against gold: Spearman's ρ for graded change,
//! average precision for binary change, baselines and grid aggregation.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::corpus::{LemmaKey, Pos};
use crate::rng::rng_from_seed;
use crate::simulator::GoldRow;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need at least 3 lemmas with prediction and gold, found {0}")]
    TooFewPairs(usize),
    #[error("no positive gold labels among the {0} ranked lemmas")]
    NoPositives(usize),
    #[error("duplicate prediction for {0}")]
    DuplicateLemma(LemmaKey),
    #[error("{path}, line {line}: {message}")]
    Malformed { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// Change scores predicted for a set of lemmas; `None` marks a lemma the
/// model could not score.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionSet {
    pub id: String,
    pub scores: BTreeMap<LemmaKey, Option<f64>>,
}

impl PredictionSet {
    pub fn new(id: impl Into<String>) -> Self {
        PredictionSet {
            id: id.into(),
            scores: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, lemma: LemmaKey, score: Option<f64>) -> Result<(), EvalError> {
        if self.scores.contains_key(&lemma) {
            return Err(EvalError::DuplicateLemma(lemma));
        }
        self.scores.insert(lemma, score);
        Ok(())
    }

    pub fn get(&self, lemma: &LemmaKey) -> Option<f64> {
        self.scores.get(lemma).copied().flatten()
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (lemma, score) in &self.scores {
            match score {
                Some(s) => writeln!(out, "{}\t{}\t{}", lemma.lemma, lemma.pos, s)?,
                None => writeln!(out, "{}\t{}\tNA", lemma.lemma, lemma.pos)?,
            }
        }
        Ok(())
    }

    /// Reads `lemma TAB pos TAB score` lines; `NA` marks a missing score.
    pub fn read(path: &Path, id: impl Into<String>) -> Result<PredictionSet, EvalError> {
        let path_str = || path.display().to_string();
        let file = File::open(path).map_err(|source| EvalError::Io { path: path_str(), source })?;
        let mut set = PredictionSet::new(id);
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| EvalError::Io { path: path_str(), source })?;
            if line.is_empty() {
                continue;
            }
            let malformed = |message: String| EvalError::Malformed { path: path_str(), line: i + 1, message };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(malformed(format!("expected 3 columns, found {}", fields.len())));
            }
            let score = match fields[2] {
                "NA" => None,
                s => Some(
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| malformed(format!("bad score {s:?}")))?,
                ),
            };
            set.insert(LemmaKey::new(fields[0], Pos::from_tag(fields[1])), score)?;
        }
        Ok(set)
    }
}

/// Ranks starting at 1, ties receiving the average of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankCorrelation {
    pub rho: f64,
    pub n: usize,
    /// Fraction of gold lemmas that received a prediction.
    pub coverage: f64,
    /// Set when either ranking is constant; ρ is then reported as 0.
    pub degenerate: bool,
}

/// Spearman's ρ between predictions and graded gold, over lemmas present in both.
pub fn spearman(pred: &PredictionSet, gold: &BTreeMap<LemmaKey, f64>) -> Result<RankCorrelation, EvalError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = gold
        .iter()
        .filter_map(|(lemma, &g)| pred.get(lemma).map(|p| (p, g)))
        .unzip();
    let n = xs.len();
    if n < 3 {
        return Err(EvalError::TooFewPairs(n));
    }
    let coverage = n as f64 / gold.len() as f64;
    let (rx, ry) = (average_ranks(&xs), average_ranks(&ys));
    let mean = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mean, b - mean);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(RankCorrelation { rho: 0.0, n, coverage, degenerate: true });
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(RankCorrelation { rho, n, coverage, degenerate: false })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionScore {
    pub ap: f64,
    pub n: usize,
    pub coverage: f64,
}

/// AP of a ranked label list: mean over positives of the precision at their rank.
pub fn ap_of_ranking(labels: impl IntoIterator<Item = bool>) -> Option<f64> {
    let (mut hits, mut sum) = (0usize, 0.0);
    for (i, positive) in labels.into_iter().enumerate() {
        if positive {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    (hits > 0).then(|| sum / hits as f64)
}

/// Average precision of predictions against binary gold. Lemmas are ranked
/// by descending score, ties broken by ascending lemma key.
pub fn average_precision(pred: &PredictionSet, gold: &BTreeMap<LemmaKey, bool>) -> Result<PrecisionScore, EvalError> {
    // BTreeMap iteration is already in ascending key order; the stable sort keeps it for ties.
    let mut ranked: Vec<(f64, bool)> = gold
        .iter()
        .filter_map(|(lemma, &label)| pred.get(lemma).map(|p| (p, label)))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let n = ranked.len();
    let ap = ap_of_ranking(ranked.iter().map(|r| r.1)).ok_or(EvalError::NoPositives(n))?;
    let coverage = if gold.is_empty() { 0.0 } else { n as f64 / gold.len() as f64 };
    Ok(PrecisionScore { ap, n, coverage })
}

/// Number of senses attested in either corpus.
pub fn poly_baseline(rows: &[GoldRow]) -> PredictionSet {
    let mut set = PredictionSet::new("POLY");
    for r in rows {
        let senses = r
            .sfd_c1
            .iter()
            .zip(&r.sfd_c2)
            .filter(|(&a, &b)| a + b > 0)
            .count();
        set.scores.insert(r.lemma.clone(), Some(senses as f64));
    }
    set
}

/// Normalized frequency difference `|f1/N1 - f2/N2| / max(f1/N1, f2/N2)`.
pub fn nfd(freq_c1: u64, tokens_c1: u64, freq_c2: u64, tokens_c2: u64) -> f64 {
    let rel = |f: u64, n: u64| if n == 0 { 0.0 } else { f as f64 / n as f64 };
    let (a, b) = (rel(freq_c1, tokens_c1), rel(freq_c2, tokens_c2));
    let hi = a.max(b);
    if hi == 0.0 {
        0.0
    } else {
        (a - b).abs() / hi
    }
}

pub fn freq_baseline(rows: &[GoldRow]) -> PredictionSet {
    let mut set = PredictionSet::new("FREQ");
    for r in rows {
        set.scores
            .insert(r.lemma.clone(), Some(nfd(r.freq_c1, r.tokens_c1, r.freq_c2, r.tokens_c2)));
    }
    set
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomBaseline {
    pub mean: f64,
    pub std_err: f64,
    /// Fraction of positives, the large-sample value of the expectation.
    pub analytic: f64,
    pub trials: usize,
}

/// Monte-Carlo mean AP over uniformly random rankings of `labels`. Trial `t`
/// uses stream `t` of the seeded generator, so trials are independent of
/// evaluation order.
pub fn random_baseline_ap(labels: &[bool], trials: usize, seed: u64) -> Result<RandomBaseline, EvalError> {
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 {
        return Err(EvalError::NoPositives(labels.len()));
    }
    let trials = trials.max(1);
    let mut scores = Vec::with_capacity(trials);
    let mut order = labels.to_vec();
    for t in 0..trials {
        let mut rng = rng_from_seed(seed);
        rng.set_stream(t as u64);
        order.copy_from_slice(labels);
        order.shuffle(&mut rng);
        scores.push(ap_of_ranking(order.iter().copied()).expect("positives present"));
    }
    let mean = scores.iter().sum::<f64>() / trials as f64;
    let std_err = if trials > 1 {
        let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(RandomBaseline {
        mean,
        std_err,
        analytic: positives as f64 / labels.len() as f64,
        trials,
    })
}

/// Identity of a grid cell parsed from a prediction file stem of the form
/// `<model>+<alignment>+<measure>+d<dim>+i<iter>`. Stems that do not follow
/// the pattern are treated as a single deterministic cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellId {
    pub cell: String,
    pub measure: String,
    pub iteration: u32,
}

impl CellId {
    pub fn parse(stem: &str) -> CellId {
        let parts: Vec<&str> = stem.split('+').collect();
        if parts.len() == 5 && parts[3].starts_with('d') {
            if let Some(Ok(iteration)) = parts[4].strip_prefix('i').map(str::parse) {
                return CellId {
                    cell: parts[..4].join("+"),
                    measure: parts[2].to_string(),
                    iteration,
                };
            }
        }
        CellId {
            cell: stem.to_string(),
            measure: "EXT".to_string(),
            iteration: 0,
        }
    }
}

/// Scores of one prediction file.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationScore {
    pub id: CellId,
    pub rho: Option<RankCorrelation>,
    pub ap: Option<PrecisionScore>,
}

/// Scores one prediction set against the testset.
pub fn score_predictions(id: CellId, pred: &PredictionSet, testset: &[GoldRow]) -> IterationScore {
    let (graded, binary) = gold_maps(testset);
    IterationScore {
        id,
        rho: spearman(pred, &graded).ok(),
        ap: average_precision(pred, &binary).ok(),
    }
}

/// Graded and binary gold keyed by lemma, for scorable rows.
pub fn gold_maps(rows: &[GoldRow]) -> (BTreeMap<LemmaKey, f64>, BTreeMap<LemmaKey, bool>) {
    let graded = rows
        .iter()
        .filter_map(|r| r.graded.map(|g| (r.lemma.clone(), g)))
        .collect();
    let binary = rows
        .iter()
        .filter_map(|r| r.binary.map(|b| (r.lemma.clone(), b == 1)))
        .collect();
    (graded, binary)
}

/// One grid cell after averaging over its iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRow {
    pub cell: String,
    pub measure: String,
    pub iterations: usize,
    pub rho: Option<f64>,
    pub ap: Option<f64>,
    pub coverage: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub family: String,
    pub graded_mean: Option<f64>,
    pub graded_best: Option<f64>,
    pub graded_model: Option<String>,
    pub binary_mean: Option<f64>,
    pub binary_best: Option<f64>,
    pub binary_model: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Baselines {
    pub poly: IterationScore,
    pub freq: IterationScore,
    pub rand: Option<RandomBaseline>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub cells: Vec<CellRow>,
    pub summary: Vec<SummaryRow>,
    pub baselines: Baselines,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn best<'a>(cells: impl Iterator<Item = (&'a str, Option<f64>)>) -> Option<(f64, String)> {
    let mut top: Option<(f64, String)> = None;
    for (name, v) in cells {
        if let Some(v) = v {
            if top.as_ref().is_none_or(|(t, _)| v > *t) {
                top = Some((v, name.to_string()));
            }
        }
    }
    top
}

fn summarize(family: &str, cells: &[&CellRow]) -> SummaryRow {
    let rhos: Vec<f64> = cells.iter().filter_map(|c| c.rho).collect();
    let aps: Vec<f64> = cells.iter().filter_map(|c| c.ap).collect();
    let graded = best(cells.iter().map(|c| (c.cell.as_str(), c.rho)));
    let binary = best(cells.iter().map(|c| (c.cell.as_str(), c.ap)));
    SummaryRow {
        family: family.to_string(),
        graded_mean: mean(&rhos),
        graded_best: graded.as_ref().map(|g| g.0),
        graded_model: graded.map(|g| g.1),
        binary_mean: mean(&aps),
        binary_best: binary.as_ref().map(|b| b.0),
        binary_model: binary.map(|b| b.1),
    }
}

fn baseline_row(family: &str, score: &IterationScore) -> SummaryRow {
    let rho = score.rho.map(|r| r.rho);
    let ap = score.ap.map(|a| a.ap);
    SummaryRow {
        family: family.to_string(),
        graded_mean: rho,
        graded_best: rho,
        graded_model: None,
        binary_mean: ap,
        binary_best: ap,
        binary_model: None,
    }
}

/// Averages each cell over its iterations, then forms the mean and best
/// cell overall (`SIM`) and per measure (`SIM:<measure>`), followed by the
/// baseline rows.
pub fn aggregate(scores: &[IterationScore], baselines: Baselines) -> EvaluationReport {
    let mut grouped: BTreeMap<&str, Vec<&IterationScore>> = BTreeMap::new();
    for s in scores {
        grouped.entry(s.id.cell.as_str()).or_default().push(s);
    }
    let cells: Vec<CellRow> = grouped
        .into_iter()
        .map(|(cell, its)| {
            let rhos: Vec<f64> = its.iter().filter_map(|s| s.rho.map(|r| r.rho)).collect();
            let aps: Vec<f64> = its.iter().filter_map(|s| s.ap.map(|a| a.ap)).collect();
            let coverages: Vec<f64> = its.iter().filter_map(|s| s.rho.map(|r| r.coverage)).collect();
            CellRow {
                cell: cell.to_string(),
                measure: its[0].id.measure.clone(),
                iterations: its.len(),
                rho: mean(&rhos),
                ap: mean(&aps),
                coverage: mean(&coverages).unwrap_or(0.0),
                degenerate: its.iter().any(|s| s.rho.is_some_and(|r| r.degenerate)),
            }
        })
        .collect();

    let mut summary = Vec::new();
    if !cells.is_empty() {
        let all: Vec<&CellRow> = cells.iter().collect();
        summary.push(summarize("SIM", &all));
        let mut measures: Vec<&str> = cells.iter().map(|c| c.measure.as_str()).collect();
        measures.sort();
        measures.dedup();
        if measures.len() > 1 {
            for m in measures {
                let subset: Vec<&CellRow> = cells.iter().filter(|c| c.measure == m).collect();
                summary.push(summarize(&format!("SIM:{m}"), &subset));
            }
        }
    }
    summary.push(baseline_row("POLY", &baselines.poly));
    summary.push(baseline_row("FREQ", &baselines.freq));
    summary.push(SummaryRow {
        family: "RAND".to_string(),
        graded_mean: None,
        graded_best: None,
        graded_model: None,
        binary_mean: baselines.rand.map(|r| r.mean),
        binary_best: baselines.rand.map(|r| r.mean),
        binary_model: None,
    });
    EvaluationReport { cells, summary, baselines }
}

/// Computes the three baselines on the testset.
pub fn baselines(testset: &[GoldRow], trials: usize, seed: u64) -> Baselines {
    let (_, binary) = gold_maps(testset);
    let labels: Vec<bool> = binary.values().copied().collect();
    Baselines {
        poly: score_predictions(CellId::parse("POLY"), &poly_baseline(testset), testset),
        freq: score_predictions(CellId::parse("FREQ"), &freq_baseline(testset), testset),
        rand: random_baseline_ap(&labels, trials, seed).ok(),
    }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.decimals$}"))
}

pub const REPORT_HEADER: &str = "cell\tmeasure\titerations\trho\tap\tcoverage\tdegenerate\tap_stderr";

impl EvaluationReport {
    /// Full grid, one row per cell, then POLY, FREQ and RAND.
    pub fn write_full<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{REPORT_HEADER}")?;
        for c in &self.cells {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t-",
                c.cell,
                c.measure,
                c.iterations,
                fmt_opt(c.rho, 6),
                fmt_opt(c.ap, 6),
                c.coverage,
                u8::from(c.degenerate)
            )?;
        }
        for (name, b) in [("POLY", &self.baselines.poly), ("FREQ", &self.baselines.freq)] {
            writeln!(
                out,
                "{name}\t-\t1\t{}\t{}\t{:.6}\t{}\t-",
                fmt_opt(b.rho.map(|r| r.rho), 6),
                fmt_opt(b.ap.map(|a| a.ap), 6),
                b.rho.map_or(0.0, |r| r.coverage),
                u8::from(b.rho.is_some_and(|r| r.degenerate))
            )?;
        }
        if let Some(r) = self.baselines.rand {
            writeln!(out, "RAND\t-\t{}\t-\t{:.6}\t1.000000\t0\t{:.6}", r.trials, r.mean, r.std_err)?;
            writeln!(out, "RAND:analytic\t-\t1\t-\t{:.6}\t1.000000\t0\t-", r.analytic)?;
        }
        Ok(())
    }

    /// Mean/best table with three decimals.
    pub fn write_summary<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "family\tgraded_mean\tgraded_best\tgraded_model\tbinary_mean\tbinary_best\tbinary_model")?;
        for r in &self.summary {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.family,
                fmt_opt(r.graded_mean, 3),
                fmt_opt(r.graded_best, 3),
                r.graded_model.as_deref().unwrap_or("-"),
                fmt_opt(r.binary_mean, 3),
                fmt_opt(r.binary_best, 3),
                r.binary_model.as_deref().unwrap_or("-"),
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(i: usize) -> LemmaKey {
        LemmaKey::new(&format!("w{i:02}"), Pos::Noun)
    }

    fn preds(values: &[f64]) -> PredictionSet {
        let mut p = PredictionSet::new("t");
        for (i, &v) in values.iter().enumerate() {
            p.insert(key(i), Some(v)).unwrap();
        }
        p
    }

    fn graded(values: &[f64]) -> BTreeMap<LemmaKey, f64> {
        values.iter().enumerate().map(|(i, &v)| (key(i), v)).collect()
    }

    fn binary(values: &[bool]) -> BTreeMap<LemmaKey, bool> {
        values.iter().enumerate().map(|(i, &v)| (key(i), v)).collect()
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 20.0, 5.0]), vec![2.0, 3.5, 3.5, 1.0]);
        assert_eq!(average_ranks(&[1.0, 1.0, 1.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn spearman_examples() {
        let g = graded(&[1.0, 2.0, 3.0, 4.0]);
        assert!((spearman(&preds(&[1.0, 2.0, 3.0, 4.0]), &g).unwrap().rho - 1.0).abs() < 1e-12);
        assert!((spearman(&preds(&[4.0, 3.0, 2.0, 1.0]), &g).unwrap().rho + 1.0).abs() < 1e-12);
        let r = spearman(&preds(&[1.0, 3.0, 2.0, 4.0]), &g).unwrap();
        assert!((r.rho - 0.8).abs() < 1e-12);
        assert_eq!(r.coverage, 1.0);
    }

    #[test]
    fn spearman_needs_three_pairs() {
        let g = graded(&[1.0, 2.0, 3.0]);
        let mut p = preds(&[1.0, 2.0]);
        p.insert(key(2), None).unwrap();
        assert!(matches!(spearman(&p, &g), Err(EvalError::TooFewPairs(2))));
    }

    #[test]
    fn spearman_missing_predictions_reduce_coverage() {
        let g = graded(&[1.0, 2.0, 3.0, 4.0]);
        let mut p = preds(&[1.0, 2.0, 3.0]);
        p.insert(key(3), None).unwrap();
        let r = spearman(&p, &g).unwrap();
        assert_eq!((r.n, r.coverage), (3, 0.75));
        assert!((r.rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_predictions_are_degenerate() {
        let r = spearman(&preds(&[0.5; 5]), &graded(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.rho, 0.0);
    }

    #[test]
    fn ap_examples() {
        let p = preds(&[4.0, 3.0, 2.0, 1.0]);
        assert_eq!(average_precision(&p, &binary(&[true, true, false, false])).unwrap().ap, 1.0);
        assert_eq!(average_precision(&p, &binary(&[false, true, false, false])).unwrap().ap, 0.5);
        let ap = average_precision(&p, &binary(&[true, false, true, false])).unwrap().ap;
        assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
        assert!(matches!(average_precision(&p, &binary(&[false; 4])), Err(EvalError::NoPositives(4))));
    }

    #[test]
    fn ap_ties_break_on_lemma_key() {
        // all scores equal: ranking is w00, w01, w02
        let p = preds(&[1.0, 1.0, 1.0]);
        assert_eq!(average_precision(&p, &binary(&[false, true, false])).unwrap().ap, 0.5);
        assert_eq!(average_precision(&p, &binary(&[true, false, false])).unwrap().ap, 1.0);
    }

    #[test]
    fn poly_and_freq_baselines() {
        let row = |name: &str, c1: Vec<u64>, c2: Vec<u64>, f1, f2| GoldRow {
            lemma: LemmaKey::new(name, Pos::Noun),
            graded: Some(0.0),
            binary: Some(0),
            freq_c1: f1,
            freq_c2: f2,
            re: 0.0,
            is_target: false,
            in_testset: true,
            annotated_c1: c1.iter().sum(),
            annotated_c2: c2.iter().sum(),
            sfd_c1: c1,
            sfd_c2: c2,
            tokens_c1: 10_000,
            tokens_c2: 20_000,
        };
        let rows = vec![
            row("plant", vec![0, 2], vec![3, 0], 2, 3),
            row("mono", vec![4], vec![5], 0, 0),
            row("three", vec![3, 0, 1, 0], vec![0, 2, 0, 0], 2, 4),
        ];
        let poly = poly_baseline(&rows);
        assert_eq!(poly.get(&rows[0].lemma), Some(2.0));
        assert_eq!(poly.get(&rows[1].lemma), Some(1.0));
        assert_eq!(poly.get(&rows[2].lemma), Some(3.0));
        let freq = freq_baseline(&rows);
        // 2/10000 vs 4/20000 are equal relative frequencies
        assert_eq!(freq.get(&rows[2].lemma), Some(0.0));
        assert_eq!(freq.get(&rows[1].lemma), Some(0.0));
    }

    #[test]
    fn nfd_examples() {
        assert_eq!(nfd(10, 1000, 20, 2000), 0.0);
        assert_eq!(nfd(7, 1000, 0, 2000), 1.0);
        assert!((nfd(2, 10_000, 1, 10_000) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_baseline_edges() {
        let all = random_baseline_ap(&[true; 7], 50, 1).unwrap();
        assert_eq!(all.mean, 1.0);
        let half = random_baseline_ap(&[true, false], 4000, 1).unwrap();
        assert!((half.mean - 0.75).abs() < 3.0 * half.std_err + 1e-12, "{half:?}");
        assert!(random_baseline_ap(&[false, false], 10, 1).is_err());
        assert_eq!(random_baseline_ap(&[true, false], 100, 9).unwrap(), random_baseline_ap(&[true, false], 100, 9).unwrap());
    }

    #[test]
    fn cell_ids() {
        let id = CellId::parse("SGNS+OP+CD+d30+i3");
        assert_eq!(id.cell, "SGNS+OP+CD+d30");
        assert_eq!(id.measure, "CD");
        assert_eq!(id.iteration, 3);
        let ext = CellId::parse("my-model");
        assert_eq!(ext.cell, "my-model");
        assert_eq!(ext.iteration, 0);
    }

    fn score(cell: &str, rho: f64, ap: f64) -> IterationScore {
        IterationScore {
            id: CellId::parse(cell),
            rho: Some(RankCorrelation { rho, n: 10, coverage: 1.0, degenerate: false }),
            ap: Some(PrecisionScore { ap, n: 10, coverage: 1.0 }),
        }
    }

    fn no_baselines() -> Baselines {
        let empty = IterationScore { id: CellId::parse("X"), rho: None, ap: None };
        Baselines { poly: empty.clone(), freq: empty, rand: None }
    }

    #[test]
    fn aggregate_examples() {
        let report = aggregate(&[score("SVD+OP+CD+d30+i0", 0.3, 0.2)], no_baselines());
        let sim = &report.summary[0];
        assert_eq!((sim.graded_mean, sim.graded_best), (Some(0.3), Some(0.3)));

        let report = aggregate(
            &[score("SVD+OP+CD+d30+i0", 0.2, 0.1), score("SVD+WI+CD+d30+i0", 0.4, 0.3)],
            no_baselines(),
        );
        let sim = &report.summary[0];
        assert!((sim.graded_mean.unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(sim.graded_best, Some(0.4));
        assert_eq!(sim.graded_model.as_deref(), Some("SVD+WI+CD+d30"));

        let its: Vec<IterationScore> = [0.1, 0.2, 0.3, 0.4, 0.5]
            .iter()
            .enumerate()
            .map(|(i, &r)| score(&format!("SGNS+OP+CD+d30+i{i}"), r, r / 2.0))
            .collect();
        let report = aggregate(&its, no_baselines());
        assert_eq!(report.cells.len(), 1);
        assert_eq!(report.cells[0].iterations, 5);
        assert!((report.cells[0].rho.unwrap() - 0.3).abs() < 1e-12);
        assert!((report.cells[0].ap.unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn baselines_only_report_has_three_rows() {
        let report = aggregate(&[], no_baselines());
        let families: Vec<&str> = report.summary.iter().map(|r| r.family.as_str()).collect();
        assert_eq!(families, vec!["POLY", "FREQ", "RAND"]);
    }

    #[test]
    fn prediction_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        let mut p = preds(&[0.25, 1.0 / 3.0]);
        p.insert(key(5), None).unwrap();
        p.write(File::create(&path).unwrap()).unwrap();
        let back = PredictionSet::read(&path, "t").unwrap();
        assert_eq!(back, p);

        std::fs::write(&path, "a\tNOUN\t0.1\na\tNOUN\t0.2\n").unwrap();
        assert!(matches!(PredictionSet::read(&path, "t"), Err(EvalError::DuplicateLemma(_))));
        std::fs::write(&path, "a\tNOUN\n").unwrap();
        assert!(matches!(PredictionSet::read(&path, "t"), Err(EvalError::Malformed { line: 1, .. })));
        std::fs::write(&path, "a\tNOUN\tNaN\n").unwrap();
        assert!(PredictionSet::read(&path, "t").is_err());
    }
}
