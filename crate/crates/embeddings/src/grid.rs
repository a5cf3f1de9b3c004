//! The model grid: which (model, alignment, dimension, iteration) jobs
//! exist, and how one job turns two corpora into per-measure predictions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use lscsim_core::evaluation::PredictionSet;
use lscsim_core::rng::{derive_seed, RNG_ALGORITHM};
use lscsim_core::LemmaKey;

use crate::align::{align_ci, align_op, injected, word_injection};
use crate::corpus::PlainCorpus;
use crate::count::{count_space, ppmi_space, DEFAULT_WINDOW};
use crate::error::EmbedError;
use crate::measures::{cosine_distance, LocalNeighbourhood, DEFAULT_K_NN};
use crate::sgns::{self, SgnsConfig};
use crate::space::EmbeddingSpace;
use crate::svd::{svd_space, EXACT_LIMIT};

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = EmbedError;

            fn from_str(s: &str) -> Result<Self, EmbedError> {
                match s.trim().to_ascii_uppercase().as_str() {
                    $($text => Ok($name::$variant),)+
                    other => Err(EmbedError::InvalidConfig(format!(
                        "unknown {} {other:?}", stringify!($name).to_lowercase()
                    ))),
                }
            }
        }
    };
}

named_enum!(Model { Count => "COUNT", Ppmi => "PPMI", Svd => "SVD", Sgns => "SGNS" });
named_enum!(Alignment { Ci => "CI", Op => "OP", Wi => "WI" });
named_enum!(Measure { Cd => "CD", Lnd => "LND" });

impl Model {
    pub fn is_sparse(self) -> bool {
        matches!(self, Model::Count | Model::Ppmi)
    }

    /// Models whose output depends on a random seed are run several times.
    pub fn is_random(self) -> bool {
        self == Model::Sgns
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelGridSpec {
    pub models: Vec<Model>,
    pub alignments: Vec<Alignment>,
    pub measures: Vec<Measure>,
    /// Dimensions of dense models; sparse models ignore them.
    pub dims: Vec<usize>,
    /// Repetitions of random-component models.
    pub iterations: usize,
    pub window: usize,
    pub k_nn: usize,
    /// SGNS hyperparameters; `dim` is taken from the grid.
    pub sgns: SgnsConfig,
    pub seed: u64,
}

impl Default for ModelGridSpec {
    fn default() -> Self {
        ModelGridSpec {
            models: Model::ALL.to_vec(),
            alignments: Alignment::ALL.to_vec(),
            measures: Measure::ALL.to_vec(),
            dims: vec![30, 100],
            iterations: 5,
            window: DEFAULT_WINDOW,
            k_nn: DEFAULT_K_NN,
            sgns: SgnsConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Job {
    pub model: Model,
    pub alignment: Alignment,
    /// 0 for sparse models.
    pub dim: usize,
    /// 1-based.
    pub iteration: usize,
}

impl Job {
    pub fn label(&self) -> String {
        format!("{}+{}+d{}+i{}", self.model, self.alignment, self.dim, self.iteration)
    }

    /// File stem of the prediction file for one measure.
    pub fn cell_id(&self, measure: Measure) -> String {
        format!("{}+{}+{}+d{}+i{}", self.model, self.alignment, measure, self.dim, self.iteration)
    }
}

/// Combinations the grid leaves out, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skipped {
    pub model: Model,
    pub alignment: Alignment,
    pub reason: &'static str,
}

impl ModelGridSpec {
    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.window == 0 {
            return Err(EmbedError::InvalidConfig("window must be positive".into()));
        }
        if self.k_nn == 0 {
            return Err(EmbedError::InvalidConfig("k_nn must be positive".into()));
        }
        if self.iterations == 0 {
            return Err(EmbedError::InvalidConfig("iterations must be positive".into()));
        }
        if self.dims.contains(&0) {
            return Err(EmbedError::InvalidConfig("dimensions must be positive".into()));
        }
        let mut sgns = self.sgns.clone();
        sgns.dim = 1;
        sgns.validate()
    }

    /// Runnable jobs in a fixed order, plus the combinations left out.
    pub fn jobs(&self) -> (Vec<Job>, Vec<Skipped>) {
        let mut jobs = Vec::new();
        let mut skipped = Vec::new();
        if self.measures.is_empty() {
            return (jobs, skipped);
        }
        let mut dims = self.dims.clone();
        dims.sort_unstable();
        dims.dedup();
        for &model in &self.models {
            for &alignment in &self.alignments {
                let reason = match (model.is_sparse(), alignment) {
                    (true, Alignment::Op) => Some("rotation of sparse spaces is out of reach at corpus vocabulary size"),
                    (false, Alignment::Ci) => Some("column intersection needs named context columns"),
                    _ => None,
                };
                if let Some(reason) = reason {
                    skipped.push(Skipped {
                        model,
                        alignment,
                        reason,
                    });
                    continue;
                }
                let model_dims = if model.is_sparse() { vec![0] } else { dims.clone() };
                let iterations = if model.is_random() { self.iterations } else { 1 };
                for &dim in &model_dims {
                    for iteration in 1..=iterations {
                        jobs.push(Job {
                            model,
                            alignment,
                            dim,
                            iteration,
                        });
                    }
                }
            }
        }
        jobs.sort();
        jobs.dedup();
        (jobs, skipped)
    }
}

/// Corpora and targets shared by all jobs, with lazily built count-based
/// spaces reused across jobs.
pub struct GridInputs {
    pub c1: PlainCorpus,
    pub c2: PlainCorpus,
    pub targets: Vec<LemmaKey>,
    window: usize,
    injected: Result<PlainCorpus, String>,
    counts: [OnceLock<Result<EmbeddingSpace, String>>; 3],
    ppmi: [OnceLock<Result<EmbeddingSpace, String>>; 3],
}

#[derive(Debug, Clone, Copy)]
enum Source {
    C1 = 0,
    C2 = 1,
    Injected = 2,
}

/// Surface form of a lemma in the plain corpora, if it is a single token.
pub fn plain_word(lemma: &LemmaKey) -> Option<String> {
    let w = lemma.lemma.to_lowercase();
    (!w.is_empty() && !w.contains(|c: char| c == '_' || c.is_whitespace() || c == '@')).then_some(w)
}

impl GridInputs {
    pub fn new(c1: PlainCorpus, c2: PlainCorpus, targets: Vec<LemmaKey>, window: usize) -> Self {
        let mut words: Vec<String> = targets.iter().filter_map(plain_word).collect();
        words.sort();
        words.dedup();
        let injected = word_injection(&c1, &c2, &words).map_err(|e| e.to_string());
        GridInputs {
            c1,
            c2,
            targets,
            window,
            injected,
            counts: Default::default(),
            ppmi: Default::default(),
        }
    }

    fn corpus(&self, source: Source) -> Result<&PlainCorpus, EmbedError> {
        match source {
            Source::C1 => Ok(&self.c1),
            Source::C2 => Ok(&self.c2),
            Source::Injected => self.injected.as_ref().map_err(|e| EmbedError::InvalidConfig(e.clone())),
        }
    }

    fn counts(&self, source: Source) -> Result<&EmbeddingSpace, EmbedError> {
        self.counts[source as usize]
            .get_or_init(|| {
                let corpus = self.corpus(source).map_err(|e| e.to_string())?;
                count_space(corpus, self.window).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| EmbedError::InvalidConfig(e.clone()))
    }

    fn ppmi(&self, source: Source) -> Result<&EmbeddingSpace, EmbedError> {
        self.ppmi[source as usize]
            .get_or_init(|| ppmi_space(self.counts(source).map_err(|e| e.to_string())?).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| EmbedError::InvalidConfig(e.clone()))
    }
}

/// Predictions of one grid cell (job × measure).
#[derive(Debug, Clone)]
pub struct CellOutput {
    pub id: String,
    pub predictions: PredictionSet,
    pub provenance: BTreeMap<String, String>,
}

enum Spaces {
    Shared(EmbeddingSpace),
    Pair(EmbeddingSpace, EmbeddingSpace),
}

fn build_space(job: &Job, spec: &ModelGridSpec, inputs: &GridInputs, source: Source, seed: u64) -> Result<EmbeddingSpace, EmbedError> {
    match job.model {
        Model::Count => inputs.counts(source).cloned(),
        Model::Ppmi => inputs.ppmi(source).cloned(),
        Model::Svd => svd_space(inputs.ppmi(source)?, job.dim, seed),
        Model::Sgns => {
            let config = SgnsConfig {
                dim: job.dim,
                ..spec.sgns.clone()
            };
            sgns::train(inputs.corpus(source)?, &config, seed)
        }
    }
}

fn job_seed(spec: &ModelGridSpec, job: &Job) -> u64 {
    // deterministic models get the same seed in every iteration
    let label = if job.model.is_random() {
        job.label()
    } else {
        format!("{}+{}+d{}", job.model, job.alignment, job.dim)
    };
    derive_seed(spec.seed, &label)
}

/// Trains, aligns and measures one job, returning one output per measure
/// in `spec.measures`. Lemmas that cannot be measured are recorded as missing.
pub fn run_job(job: &Job, spec: &ModelGridSpec, inputs: &GridInputs) -> Result<Vec<CellOutput>, EmbedError> {
    let seed = job_seed(spec, job);
    let spaces = match job.alignment {
        Alignment::Wi => Spaces::Shared(build_space(job, spec, inputs, Source::Injected, seed)?),
        Alignment::Ci => {
            let a = build_space(job, spec, inputs, Source::C1, seed)?;
            let b = build_space(job, spec, inputs, Source::C2, seed)?;
            let (a, b) = align_ci(&a, &b)?;
            Spaces::Pair(a, b)
        }
        Alignment::Op => {
            let a = build_space(job, spec, inputs, Source::C1, derive_seed(seed, "c1"))?;
            let b = build_space(job, spec, inputs, Source::C2, derive_seed(seed, "c2"))?;
            let op = align_op(&a, &b)?;
            Spaces::Pair(op.reference, op.aligned)
        }
    };
    let (a, b): (&EmbeddingSpace, &EmbeddingSpace) = match &spaces {
        Spaces::Shared(s) => (s, s),
        Spaces::Pair(a, b) => (a, b),
    };
    let word_pair = |lemma: &LemmaKey| -> Option<(String, String)> {
        let w = plain_word(lemma)?;
        Some(match job.alignment {
            Alignment::Wi => (injected(&w, 1), injected(&w, 2)),
            _ => (w.clone(), w),
        })
    };

    let mut outputs = Vec::new();
    for &measure in &spec.measures {
        let id = job.cell_id(measure);
        let mut predictions = PredictionSet::new(id.clone());
        let neighbourhood = match measure {
            Measure::Lnd => Some(LocalNeighbourhood::new(a, b, spec.k_nn)?),
            Measure::Cd => None,
        };
        for lemma in &inputs.targets {
            let score = word_pair(lemma).and_then(|(wa, wb)| {
                match &neighbourhood {
                    Some(n) => n.distance(&wa, &wb),
                    None => cosine_distance(a, &wa, b, &wb),
                }
                .ok()
            });
            predictions
                .insert(lemma.clone(), score)
                .map_err(|e| EmbedError::InvalidConfig(e.to_string()))?;
        }
        outputs.push(CellOutput {
            id,
            predictions,
            provenance: provenance(job, measure, spec, inputs, seed, a, b),
        });
    }
    Ok(outputs)
}

fn provenance(
    job: &Job,
    measure: Measure,
    spec: &ModelGridSpec,
    inputs: &GridInputs,
    seed: u64,
    a: &EmbeddingSpace,
    b: &EmbeddingSpace,
) -> BTreeMap<String, String> {
    let mut p = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        p.insert(k.to_string(), v);
    };
    put("cell", job.cell_id(measure));
    put("model", job.model.to_string());
    put("alignment", job.alignment.to_string());
    put("measure", measure.to_string());
    put("dim", job.dim.to_string());
    put("iteration", job.iteration.to_string());
    put("seed", spec.seed.to_string());
    put("job_seed", seed.to_string());
    put("rng", RNG_ALGORITHM.to_string());
    put("window", spec.window.to_string());
    put("corpus_c1", format!("{} ({} tokens)", inputs.c1.id, inputs.c1.token_count()));
    put("corpus_c2", format!("{} ({} tokens)", inputs.c2.id, inputs.c2.token_count()));
    put("vocabulary_a", a.len().to_string());
    put("vocabulary_b", b.len().to_string());
    put("min_count", "1".to_string());
    put("deterministic", "true".to_string());
    match job.model {
        Model::Count => put("weighting", "raw counts".to_string()),
        Model::Ppmi | Model::Svd => put("weighting", "ppmi, natural log, no smoothing or shift".to_string()),
        Model::Sgns => {}
    }
    if job.model == Model::Svd {
        put("svd_vectors", "U_d * Sigma_d".to_string());
        put("svd_method", format!("exact when both sides <= {EXACT_LIMIT}, else randomized (oversample 10, 5 power iterations)"));
    }
    if job.model == Model::Sgns {
        let s = &spec.sgns;
        put("epochs", s.epochs.to_string());
        put("negatives", s.negatives.to_string());
        put("learning_rate", format!("{} linear decay to 1e-4 of initial", s.learning_rate));
        put("init", "input uniform [-0.5/d, 0.5/d], output zeros".to_string());
        put("noise_distribution", format!("unigram^{}", s.noise_exponent));
        put("subsampling", "none".to_string());
        put("sgns_window", format!("uniform 1..={} per token", s.window));
        put("training", "single-threaded".to_string());
    }
    match job.alignment {
        Alignment::Op => put("op_preprocessing", "length-normalize, mean-center shared vocabulary".to_string()),
        Alignment::Wi => put("injection", "t@1 / t@2, corpora concatenated".to_string()),
        Alignment::Ci => put("ci_columns", a.dim().to_string()),
    }
    if measure == Measure::Lnd {
        put("k_nn", spec.k_nn.to_string());
    }
    p
}
