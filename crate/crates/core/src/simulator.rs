//! Two-step corpus split, gold score extraction and testset filtering.
//!
//! Step (i) pushes the uses of each target lemma into the corpus half its
//! sense subset demands. Step (ii) shuffles every sentence step (i) left
//! untouched and halves the pile. Gold scores are then read off the realized
//! split, so conflicts in step (i) weaken the simulated change but never make
//! the gold file disagree with the exported corpora.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::change::{self, ChangeScores, SenseFrequencyDistribution, DEFAULT_K};
use crate::corpus::{escape, extract_plain_tokens, AnnotatedCorpus, LemmaKey, Pos, SenseKey};
use crate::rng::{rng_from_seed, RNG_ALGORITHM};

pub const CORPUS1_FILE: &str = "corpus1.txt";
pub const CORPUS2_FILE: &str = "corpus2.txt";
pub const GOLD_FILE: &str = "gold.tsv";
pub const TESTSET_FILE: &str = "testset.tsv";
pub const SPLIT_LOG_FILE: &str = "split.log.tsv";

pub const GOLD_HEADER: &str = "lemma\tpos\tgraded\tbinary\tfreq_c1\tfreq_c2\tre\tis_target\tin_testset\tannotated_c1\tannotated_c2\tsfd_c1\tsfd_c2\ttokens_c1\ttokens_c2";

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid split configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    MalformedGold { path: String, line: usize, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SimError + '_ {
    move |source| SimError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitConfig {
    pub seed: u64,
    pub target_freq_min: usize,
    pub target_freq_max: usize,
    pub binary_k: f64,
    pub re_max: f64,
    pub testset_freq_min: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            seed: 0,
            target_freq_min: 100,
            target_freq_max: 1000,
            binary_k: DEFAULT_K,
            re_max: 0.5,
            testset_freq_min: 50,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.target_freq_min == 0 || self.target_freq_min > self.target_freq_max {
            return Err(SimError::InvalidConfig(format!(
                "target frequency range [{}, {}] is empty or starts at zero",
                self.target_freq_min, self.target_freq_max
            )));
        }
        if self.re_max.is_nan() || self.re_max <= 0.0 {
            return Err(SimError::InvalidConfig(format!("re_max must be positive, got {}", self.re_max)));
        }
        if self.testset_freq_min == 0 {
            return Err(SimError::InvalidConfig("testset_freq_min must be positive".into()));
        }
        if !(self.binary_k > 0.0 && self.binary_k <= 1.0) {
            return Err(SimError::InvalidConfig(format!("k must lie in (0, 1], got {}", self.binary_k)));
        }
        Ok(())
    }
}

/// Which half of a target lemma's senses goes to which corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetPlan {
    pub lemma: LemmaKey,
    pub senses_c1: BTreeSet<SenseKey>,
    pub senses_c2: BTreeSet<SenseKey>,
}

impl TargetPlan {
    pub fn side_for(&self, sense: &SenseKey) -> Option<Side> {
        if self.senses_c1.contains(sense) {
            Some(Side::C1)
        } else if self.senses_c2.contains(sense) {
            Some(Side::C2)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    C1,
    C2,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::C1 => "C1",
            Side::C2 => "C2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Target(LemmaKey),
    Fill,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub side: Side,
    pub rule: Rule,
    /// Targets that demanded the other side after this sentence was placed.
    pub conflicts: Vec<LemmaKey>,
}

/// Realized partition of a corpus, one assignment per sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub assignments: Vec<Assignment>,
}

impl Split {
    pub fn side(&self, sentence: usize) -> Side {
        self.assignments[sentence].side
    }

    pub fn sentences_on(&self, side: Side) -> impl Iterator<Item = usize> + '_ {
        self.assignments
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.side == side)
            .map(|(i, _)| i)
    }
}

/// Plans a sense split for every lemma whose annotated frequency lies in
/// the configured range and which has at least two attested senses.
pub fn select_targets<R: Rng>(corpus: &AnnotatedCorpus, config: &SplitConfig, rng: &mut R) -> Vec<TargetPlan> {
    let mut plans = Vec::new();
    for (lemma, stats) in corpus.lemma_inventory() {
        let in_range = (config.target_freq_min..=config.target_freq_max).contains(&stats.annotated);
        if !in_range || stats.senses.len() < 2 {
            continue;
        }
        let mut senses = stats.senses;
        senses.shuffle(rng);
        let cut = rng.gen_range(1..senses.len());
        let senses_c2 = senses.split_off(cut).into_iter().collect();
        plans.push(TargetPlan {
            lemma,
            senses_c1: senses.into_iter().collect(),
            senses_c2,
        });
    }
    plans
}

/// Assigns every sentence to C1 or C2.
///
/// Targets are processed in ascending lemma-key order and a placed sentence
/// is never moved; a later target demanding the other side is recorded as a
/// conflict. Remaining sentences are shuffled and the first ⌈n/2⌉ go to C1.
pub fn split_corpus<R: Rng>(corpus: &AnnotatedCorpus, plans: &[TargetPlan], rng: &mut R) -> Split {
    let mut slots: Vec<Option<Assignment>> = vec![None; corpus.len()];
    let mut ordered: Vec<&TargetPlan> = plans.iter().collect();
    ordered.sort_by(|a, b| a.lemma.cmp(&b.lemma));

    for plan in ordered {
        let Some(occurrences) = corpus.lemma_index().get(&plan.lemma) else {
            continue;
        };
        for occ in occurrences {
            let Some(side) = plan.side_for(&occ.sense) else {
                continue;
            };
            match &mut slots[occ.sentence] {
                slot @ None => {
                    *slot = Some(Assignment {
                        side,
                        rule: Rule::Target(plan.lemma.clone()),
                        conflicts: Vec::new(),
                    });
                }
                Some(a) if a.side != side => {
                    if !a.conflicts.contains(&plan.lemma) {
                        a.conflicts.push(plan.lemma.clone());
                    }
                }
                Some(_) => {}
            }
        }
    }

    let mut rest: Vec<usize> = (0..corpus.len()).filter(|&i| slots[i].is_none()).collect();
    rest.shuffle(rng);
    let half = rest.len().div_ceil(2);
    for (n, &i) in rest.iter().enumerate() {
        slots[i] = Some(Assignment {
            side: if n < half { Side::C1 } else { Side::C2 },
            rule: Rule::Fill,
            conflicts: Vec::new(),
        });
    }

    Split {
        assignments: slots.into_iter().map(|s| s.expect("every sentence assigned")).collect(),
    }
}

/// Gold information for one sense-annotated lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldRecord {
    pub lemma: LemmaKey,
    pub t1: SenseFrequencyDistribution,
    pub t2: SenseFrequencyDistribution,
    /// `None` when either side has no annotated use.
    pub scores: Option<ChangeScores>,
    pub freq_c1: u64,
    pub freq_c2: u64,
    pub re: f64,
    pub is_target: bool,
    pub in_testset: bool,
    pub tokens_c1: u64,
    pub tokens_c2: u64,
}

impl GoldRecord {
    pub fn annotated_c1(&self) -> u64 {
        self.t1.total()
    }

    pub fn annotated_c2(&self) -> u64 {
        self.t2.total()
    }

    pub fn is_scorable(&self) -> bool {
        self.scores.is_some()
    }

    pub fn to_row(&self) -> GoldRow {
        GoldRow {
            lemma: self.lemma.clone(),
            graded: self.scores.map(|s| s.graded),
            binary: self.scores.map(|s| s.binary),
            freq_c1: self.freq_c1,
            freq_c2: self.freq_c2,
            re: self.re,
            is_target: self.is_target,
            in_testset: self.in_testset,
            annotated_c1: self.annotated_c1(),
            annotated_c2: self.annotated_c2(),
            sfd_c1: self.t1.counts.clone(),
            sfd_c2: self.t2.counts.clone(),
            tokens_c1: self.tokens_c1,
            tokens_c2: self.tokens_c2,
        }
    }
}

/// Plain-token rendering of both halves of a split.
pub struct PlainSplit {
    pub lines: Vec<Vec<String>>,
    pub tokens_c1: u64,
    pub tokens_c2: u64,
    counts: HashMap<String, (u64, u64)>,
}

impl PlainSplit {
    pub fn new(corpus: &AnnotatedCorpus, split: &Split) -> Self {
        let lines: Vec<Vec<String>> = corpus.sentences().iter().map(extract_plain_tokens).collect();
        let mut counts: HashMap<String, (u64, u64)> = HashMap::new();
        let (mut tokens_c1, mut tokens_c2) = (0, 0);
        for (i, line) in lines.iter().enumerate() {
            let c1 = split.side(i) == Side::C1;
            if c1 {
                tokens_c1 += line.len() as u64;
            } else {
                tokens_c2 += line.len() as u64;
            }
            for word in line {
                let entry = counts.entry(word.clone()).or_default();
                if c1 {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        PlainSplit { lines, tokens_c1, tokens_c2, counts }
    }

    /// Occurrences of `word` in the exported C1 and C2 corpora.
    pub fn frequency(&self, word: &str) -> (u64, u64) {
        self.counts.get(word).copied().unwrap_or_default()
    }
}

/// Builds one gold record per sense-annotated lemma from the realized split.
pub fn compute_gold(
    corpus: &AnnotatedCorpus,
    plans: &[TargetPlan],
    split: &Split,
    config: &SplitConfig,
) -> Vec<GoldRecord> {
    let plain = PlainSplit::new(corpus, split);
    compute_gold_with(corpus, plans, split, &plain, config)
}

fn compute_gold_with(
    corpus: &AnnotatedCorpus,
    plans: &[TargetPlan],
    split: &Split,
    plain: &PlainSplit,
    config: &SplitConfig,
) -> Vec<GoldRecord> {
    let targets: BTreeSet<&LemmaKey> = plans.iter().map(|p| &p.lemma).collect();
    let inventory = corpus.lemma_inventory();
    let mut records = Vec::with_capacity(inventory.len());
    for (lemma, stats) in &inventory {
        let occurrences = &corpus.lemma_index()[lemma];
        let on = |side: Side| occurrences.iter().filter(move |o| split.side(o.sentence) == side).map(|o| &o.sense);
        let t1 = change::build_sfd(lemma, on(Side::C1), &stats.senses).expect("senses come from the same index");
        let t2 = change::build_sfd(lemma, on(Side::C2), &stats.senses).expect("senses come from the same index");
        let scores = if t1.total() > 0 && t2.total() > 0 {
            Some(change::change_scores(&t1, &t2, config.binary_k).expect("compatible non-empty distributions"))
        } else {
            None
        };
        let (freq_c1, freq_c2) = plain.frequency(&lemma.lemma);
        let re = change::relative_error(freq_c1 + freq_c2, stats.annotated as u64).expect("indexed lemmas are annotated");
        records.push(GoldRecord {
            lemma: lemma.clone(),
            t1,
            t2,
            scores,
            freq_c1,
            freq_c2,
            re,
            is_target: targets.contains(lemma),
            in_testset: false,
            tokens_c1: plain.tokens_c1,
            tokens_c2: plain.tokens_c2,
        });
    }
    filter_testset(&mut records, config);
    records
}

/// Marks the records that pass both noise filters.
pub fn filter_testset(records: &mut [GoldRecord], config: &SplitConfig) {
    for r in records.iter_mut() {
        r.in_testset = passes_filters(r.is_scorable(), r.re, r.freq_c1, r.freq_c2, config);
    }
}

pub fn passes_filters(scorable: bool, re: f64, freq_c1: u64, freq_c2: u64, config: &SplitConfig) -> bool {
    scorable && re < config.re_max && freq_c1.min(freq_c2) >= config.testset_freq_min
}

/// Everything one simulation run produces.
pub struct Simulation {
    pub plans: Vec<TargetPlan>,
    pub split: Split,
    pub plain: PlainSplit,
    pub records: Vec<GoldRecord>,
}

/// Target selection, split and gold extraction from a single seeded stream.
pub fn simulate(corpus: &AnnotatedCorpus, config: &SplitConfig) -> Result<Simulation, SimError> {
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);
    let plans = select_targets(corpus, config, &mut rng);
    let split = split_corpus(corpus, &plans, &mut rng);
    let plain = PlainSplit::new(corpus, &split);
    let records = compute_gold_with(corpus, &plans, &split, &plain, config);
    Ok(Simulation { plans, split, plain, records })
}

fn format_counts(counts: &[u64]) -> String {
    counts.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// One line of `gold.tsv` / `testset.tsv`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldRow {
    pub lemma: LemmaKey,
    pub graded: Option<f64>,
    pub binary: Option<u8>,
    pub freq_c1: u64,
    pub freq_c2: u64,
    pub re: f64,
    pub is_target: bool,
    pub in_testset: bool,
    pub annotated_c1: u64,
    pub annotated_c2: u64,
    pub sfd_c1: Vec<u64>,
    pub sfd_c2: Vec<u64>,
    pub tokens_c1: u64,
    pub tokens_c2: u64,
}

impl GoldRow {
    pub fn to_line(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "NA".to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.lemma.lemma,
            self.lemma.pos,
            opt(self.graded.map(|g| format!("{g:.6}"))),
            opt(self.binary.map(|b| b.to_string())),
            self.freq_c1,
            self.freq_c2,
            self.re,
            u8::from(self.is_target),
            u8::from(self.in_testset),
            self.annotated_c1,
            self.annotated_c2,
            format_counts(&self.sfd_c1),
            format_counts(&self.sfd_c2),
            self.tokens_c1,
            self.tokens_c2,
        )
    }

    pub fn parse_line(line: &str) -> Result<GoldRow, String> {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 15 {
            return Err(format!("expected 15 columns, found {}", f.len()));
        }
        fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("bad {what} {s:?}"))
        }
        fn flag(s: &str, what: &str) -> Result<bool, String> {
            match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(format!("bad {what} {s:?}")),
            }
        }
        let counts = |s: &str| -> Result<Vec<u64>, String> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',').map(|c| num(c, "sense count")).collect()
        };
        Ok(GoldRow {
            lemma: LemmaKey::new(f[0], Pos::from_tag(f[1])),
            graded: if f[2] == "NA" { None } else { Some(num(f[2], "graded score")?) },
            binary: if f[3] == "NA" { None } else { Some(u8::from(flag(f[3], "binary score")?)) },
            freq_c1: num(f[4], "freq_c1")?,
            freq_c2: num(f[5], "freq_c2")?,
            re: num(f[6], "re")?,
            is_target: flag(f[7], "is_target")?,
            in_testset: flag(f[8], "in_testset")?,
            annotated_c1: num(f[9], "annotated_c1")?,
            annotated_c2: num(f[10], "annotated_c2")?,
            sfd_c1: counts(f[11])?,
            sfd_c2: counts(f[12])?,
            tokens_c1: num(f[13], "tokens_c1")?,
            tokens_c2: num(f[14], "tokens_c2")?,
        })
    }
}

pub fn write_gold<W: Write>(mut out: W, rows: impl IntoIterator<Item = GoldRow>) -> io::Result<()> {
    writeln!(out, "{GOLD_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_line())?;
    }
    Ok(())
}

pub fn read_gold(path: &Path) -> Result<Vec<GoldRow>, SimError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rows = Vec::new();
    for (i, line) in io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if i == 0 {
            if line != GOLD_HEADER {
                return Err(SimError::MalformedGold {
                    path: path.display().to_string(),
                    line: 1,
                    message: "unexpected header".into(),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        rows.push(GoldRow::parse_line(&line).map_err(|message| SimError::MalformedGold {
            path: path.display().to_string(),
            line: i + 1,
            message,
        })?);
    }
    Ok(rows)
}

fn write_corpus_side<W: Write>(mut out: W, plain: &PlainSplit, split: &Split, side: Side) -> io::Result<()> {
    for i in split.sentences_on(side) {
        let line = &plain.lines[i];
        if line.is_empty() {
            continue;
        }
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

fn write_log<W: Write>(mut out: W, corpus: &AnnotatedCorpus, split: &Split, seed: u64) -> io::Result<()> {
    writeln!(out, "# seed={seed}\trng={RNG_ALGORITHM}")?;
    for (sentence, a) in corpus.sentences().iter().zip(&split.assignments) {
        let mut rule = match &a.rule {
            Rule::Target(lemma) => format!("target:{lemma}"),
            Rule::Fill => "fill".to_string(),
        };
        for c in &a.conflicts {
            rule.push_str(&format!(";conflict:{c}"));
        }
        writeln!(out, "{}\t{}\t{}", escape(&sentence.id), a.side, rule)?;
    }
    Ok(())
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), SimError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    body(&mut out).map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

/// Writes both corpora, the gold and testset files and the assignment log into `dir`.
///
/// Corpus lines keep the original sentence order within each side; sentences
/// without any word after extraction produce no line.
pub fn export(dir: &Path, corpus: &AnnotatedCorpus, sim: &Simulation, seed: u64) -> Result<(), SimError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_file(&dir.join(CORPUS1_FILE), |w| write_corpus_side(w, &sim.plain, &sim.split, Side::C1))?;
    write_file(&dir.join(CORPUS2_FILE), |w| write_corpus_side(w, &sim.plain, &sim.split, Side::C2))?;
    write_file(&dir.join(GOLD_FILE), |w| write_gold(w, sim.records.iter().map(GoldRecord::to_row)))?;
    write_file(&dir.join(TESTSET_FILE), |w| {
        write_gold(w, sim.records.iter().filter(|r| r.in_testset).map(GoldRecord::to_row))
    })?;
    write_file(&dir.join(SPLIT_LOG_FILE), |w| write_log(w, corpus, &sim.split, seed))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_str, Sentence, Token};
    use crate::rng::rng_from_seed;

    const PLANT: &str = include_str!("../tests/fixtures/plant.tsv");
    const INDUSTRIAL: &str = "plant%1:06:01::";
    const FLORA: &str = "plant%1:20:00::";

    fn plant_key() -> LemmaKey {
        LemmaKey::new("plant", Pos::Noun)
    }

    fn plant_plan() -> TargetPlan {
        TargetPlan {
            lemma: plant_key(),
            senses_c1: [SenseKey::new(FLORA)].into(),
            senses_c2: [SenseKey::new(INDUSTRIAL)].into(),
        }
    }

    /// Corpus with one lemma `w` of `uses` annotated uses over `senses` senses.
    fn single_lemma_corpus(uses: usize, senses: usize) -> AnnotatedCorpus {
        let sentences = (0..uses)
            .map(|i| Sentence {
                id: format!("s{i}"),
                tokens: vec![Token::annotated("w", "w", Pos::Noun, format!("w%{}", i % senses))],
            })
            .collect();
        AnnotatedCorpus::new(sentences).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SplitConfig::default().validate().is_ok());
        let bad = SplitConfig { target_freq_min: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SplitConfig { target_freq_min: 10, target_freq_max: 5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SplitConfig { re_max: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SplitConfig { testset_freq_min: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn three_sense_target_plan() {
        let corpus = single_lemma_corpus(150, 3);
        for seed in 0..20 {
            let plans = select_targets(&corpus, &SplitConfig::default(), &mut rng_from_seed(seed));
            assert_eq!(plans.len(), 1);
            let p = &plans[0];
            assert!(!p.senses_c1.is_empty() && !p.senses_c2.is_empty());
            assert!(p.senses_c1.is_disjoint(&p.senses_c2));
            assert_eq!(p.senses_c1.len() + p.senses_c2.len(), 3);
        }
    }

    #[test]
    fn split_index_covers_both_cut_points() {
        let corpus = single_lemma_corpus(150, 3);
        let sizes: BTreeSet<usize> = (0..50)
            .map(|seed| select_targets(&corpus, &SplitConfig::default(), &mut rng_from_seed(seed))[0].senses_c1.len())
            .collect();
        assert_eq!(sizes, [1, 2].into());
    }

    #[test]
    fn out_of_range_and_monosemous_lemmas_are_not_targets() {
        let config = SplitConfig::default();
        assert!(select_targets(&single_lemma_corpus(99, 3), &config, &mut rng_from_seed(0)).is_empty());
        assert!(select_targets(&single_lemma_corpus(1001, 3), &config, &mut rng_from_seed(0)).is_empty());
        assert!(select_targets(&single_lemma_corpus(500, 1), &config, &mut rng_from_seed(0)).is_empty());
        assert_eq!(select_targets(&single_lemma_corpus(100, 2), &config, &mut rng_from_seed(0)).len(), 1);
        assert_eq!(select_targets(&single_lemma_corpus(1000, 2), &config, &mut rng_from_seed(0)).len(), 1);
    }

    #[test]
    fn target_split_of_plant() {
        let corpus = parse_str(PLANT).unwrap();
        let split = split_corpus(&corpus, &[plant_plan()], &mut rng_from_seed(1));
        let c1: Vec<usize> = split.sentences_on(Side::C1).collect();
        let c2: Vec<usize> = split.sentences_on(Side::C2).collect();
        assert_eq!(c1, vec![2, 3]);
        assert_eq!(c2, vec![0, 1, 4]);
        assert!(split.assignments.iter().all(|a| a.rule == Rule::Target(plant_key())));

        let records = compute_gold(&corpus, &[plant_plan()], &split, &SplitConfig::default());
        let plant = records.iter().find(|r| r.lemma == plant_key()).unwrap();
        assert_eq!(plant.t1.counts, vec![0, 2]);
        assert_eq!(plant.t2.counts, vec![3, 0]);
        let scores = plant.scores.unwrap();
        assert_eq!(scores.graded, 1.0);
        assert_eq!(scores.binary, 1);
        assert!(plant.is_target);
        assert_eq!((plant.freq_c1, plant.freq_c2), (2, 3));
        assert_eq!(plant.re, 0.0);
    }

    #[test]
    fn fill_split_is_ceil_half() {
        let corpus = parse_str(PLANT).unwrap();
        for seed in 0..10 {
            let split = split_corpus(&corpus, &[], &mut rng_from_seed(seed));
            assert_eq!(split.sentences_on(Side::C1).count(), 3);
            assert_eq!(split.sentences_on(Side::C2).count(), 2);
            assert!(split.assignments.iter().all(|a| a.rule == Rule::Fill));
        }
    }

    #[test]
    fn earlier_target_wins_conflicts() {
        // sentence 0 hosts alpha (sense a1 -> C1) and beta (sense b2 -> C2)
        let text = "x\talpha|alpha|NOUN|a1 beta|beta|NOUN|b2\n\
                    y\talpha|alpha|NOUN|a2\n\
                    z\tbeta|beta|NOUN|b1\n";
        let corpus = parse_str(text).unwrap();
        let alpha = TargetPlan {
            lemma: LemmaKey::new("alpha", Pos::Noun),
            senses_c1: [SenseKey::new("a1")].into(),
            senses_c2: [SenseKey::new("a2")].into(),
        };
        let beta = TargetPlan {
            lemma: LemmaKey::new("beta", Pos::Noun),
            senses_c1: [SenseKey::new("b1")].into(),
            senses_c2: [SenseKey::new("b2")].into(),
        };
        // plan order in the input does not matter, lemma-key order does
        for plans in [vec![alpha.clone(), beta.clone()], vec![beta.clone(), alpha.clone()]] {
            let split = split_corpus(&corpus, &plans, &mut rng_from_seed(0));
            let x = &split.assignments[0];
            assert_eq!(x.side, Side::C1);
            assert_eq!(x.rule, Rule::Target(alpha.lemma.clone()));
            assert_eq!(x.conflicts, vec![beta.lemma.clone()]);
            assert_eq!(split.side(1), Side::C2);
            assert_eq!(split.side(2), Side::C1);

            let records = compute_gold(&corpus, &plans, &split, &SplitConfig::default());
            let b = records.iter().find(|r| r.lemma == beta.lemma).unwrap();
            // b2 ended up in C1 next to b1, so beta shows no change at all
            assert_eq!(b.t1.counts, vec![1, 1]);
            assert_eq!(b.t2.counts, vec![0, 0]);
            assert!(b.scores.is_none());
        }
    }

    #[test]
    fn one_sided_lemma_is_unscorable() {
        let corpus = parse_str(PLANT).unwrap();
        let split = split_corpus(&corpus, &[plant_plan()], &mut rng_from_seed(1));
        let records = compute_gold(&corpus, &[plant_plan()], &split, &SplitConfig::default());
        let pilot = records.iter().find(|r| r.lemma.lemma == "pilot").unwrap();
        assert!(pilot.scores.is_none());
        assert!(!pilot.in_testset);
        assert!(!pilot.is_target);
    }

    fn filter(re: f64, f1: u64, f2: u64) -> bool {
        passes_filters(true, re, f1, f2, &SplitConfig::default())
    }

    #[test]
    fn filter_boundaries() {
        assert!(!filter(0.5, 100, 100));
        assert!(filter(0.4999, 100, 100));
        assert!(!filter(0.1, 49, 200));
        assert!(!filter(0.1, 200, 49));
        assert!(filter(0.49, 50, 50));
        assert!(!passes_filters(false, 0.0, 100, 100, &SplitConfig::default()));
    }

    #[test]
    fn gold_row_round_trip() {
        let row = GoldRow {
            lemma: plant_key(),
            graded: Some(0.143_899_5),
            binary: Some(0),
            freq_c1: 3,
            freq_c2: 2,
            re: 0.25,
            is_target: false,
            in_testset: true,
            annotated_c1: 3,
            annotated_c2: 2,
            sfd_c1: vec![2, 1],
            sfd_c2: vec![1, 1],
            tokens_c1: 40,
            tokens_c2: 30,
        };
        let line = row.to_line();
        assert_eq!(line, "plant\tNOUN\t0.143900\t0\t3\t2\t0.250000\t0\t1\t3\t2\t2,1\t1,1\t40\t30");
        let back = GoldRow::parse_line(&line).unwrap();
        assert_eq!(back.sfd_c1, row.sfd_c1);
        assert_eq!(back.graded, Some(0.1439));
        let unscorable = GoldRow { graded: None, binary: None, ..row };
        let back = GoldRow::parse_line(&unscorable.to_line()).unwrap();
        assert_eq!((back.graded, back.binary), (None, None));
        assert!(GoldRow::parse_line("plant\tNOUN").is_err());
    }

    #[test]
    fn export_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = AnnotatedCorpus::default();
        let sim = simulate(&corpus, &SplitConfig::default()).unwrap();
        export(dir.path(), &corpus, &sim, 0).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join(CORPUS1_FILE)).unwrap(), "");
        assert_eq!(fs::read_to_string(dir.path().join(CORPUS2_FILE)).unwrap(), "");
        let gold = fs::read_to_string(dir.path().join(GOLD_FILE)).unwrap();
        assert_eq!(gold, format!("{GOLD_HEADER}\n"));
        assert!(read_gold(&dir.path().join(GOLD_FILE)).unwrap().is_empty());
    }

    #[test]
    fn export_to_unwritable_destination_fails() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let corpus = parse_str(PLANT).unwrap();
        let sim = simulate(&corpus, &SplitConfig::default()).unwrap();
        let err = export(&blocker.join("out"), &corpus, &sim, 0).unwrap_err();
        assert!(matches!(err, SimError::Io { .. }));
    }
}
