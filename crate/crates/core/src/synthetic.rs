//! Generator for SemCor-like sense-annotated corpora.
//!
//! Real sense-annotated data is not redistributable, so end-to-end runs use a
//! generated stand-in with the statistical shape that matters to the
//! pipeline:
//!
//! * Zipf-distributed content lemmas with POS, a few multiword units and
//!   noun/verb homographs;
//! * polysemy growing with frequency and skewed sense distributions;
//! * every sense lives in a topic, most further senses of a word in topics
//!   near its first one (related senses) and some anywhere (homonyms);
//! * documents have a topic, sentences mostly follow it, and content words
//!   come partly from the sentence topic and partly from general
//!   vocabulary, so senses are distinguishable by context, but not cleanly;
//! * documents that annotate every content word and documents that annotate
//!   verbs only, leaving unannotated uses behind as frequency noise;
//! * unannotated function words and punctuation.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::corpus::{AnnotatedCorpus, Pos, Sentence, Token};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub documents: usize,
    pub sentences_per_document: usize,
    pub content_lemmas: usize,
    pub zipf_exponent: f64,
    /// Rank offset of the Zipf-Mandelbrot law, flattening the head.
    pub zipf_offset: f64,
    pub topics: usize,
    /// Probability that a further sense is placed near the first sense's topic.
    pub related_senses: f64,
    /// Probability that a sentence keeps its document's topic.
    pub document_focus: f64,
    /// Probability that a content word is drawn from the sentence topic.
    pub topic_focus: f64,
    /// Probability that a content word comes from a neighbouring topic.
    pub neighbour_mix: f64,
    /// Share of documents annotating verbs only.
    pub verbs_only_share: f64,
    /// Probability that an eligible content word carries a sense annotation.
    pub annotation_rate: f64,
    pub mean_content_words: f64,
}

impl Default for SyntheticConfig {
    /// Roughly SemCor-sized: ~700k tokens in ~36k sentences, ~200k annotated.
    fn default() -> Self {
        SyntheticConfig {
            seed: 0,
            documents: 352,
            sentences_per_document: 104,
            content_lemmas: 9000,
            zipf_exponent: 1.0,
            zipf_offset: 8.0,
            topics: 400,
            related_senses: 0.75,
            document_focus: 0.6,
            topic_focus: 0.5,
            neighbour_mix: 0.2,
            verbs_only_share: 0.47,
            annotation_rate: 0.93,
            mean_content_words: 9.2,
        }
    }
}

impl SyntheticConfig {
    /// A small corpus for quick runs and tests.
    pub fn small(seed: u64) -> Self {
        SyntheticConfig {
            seed,
            documents: 20,
            sentences_per_document: 40,
            content_lemmas: 300,
            topics: 40,
            ..Default::default()
        }
    }
}

const FUNCTION_WORDS: &[&str] = &[
    "the", "of", "and", "to", "a", "in", "that", "is", "was", "he", "for", "it", "with", "as", "his", "on", "be",
    "at", "by", "i", "this", "had", "not", "are", "but", "from", "or", "have", "an", "they", "which", "one", "you",
    "were", "her", "all", "she", "there", "would", "their", "we", "him", "been", "has", "when", "who", "will",
    "more", "no", "if", "out", "so", "said", "what", "up", "its", "about", "into", "than", "them", "can", "only",
    "other", "new", "some", "could", "time", "these", "two", "may", "then", "do", "first", "any", "my", "now",
    "such", "like", "our", "over", "man", "me", "even", "most", "made", "after", "also", "did", "many", "before",
    "must", "through", "back", "years", "where", "much", "your", "way", "well", "down", "should", "because",
    "each", "just", "those", "people", "how", "too", "little", "state", "good", "very", "make", "world", "still",
];

const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z", "br", "cr", "dr", "fl",
    "gr", "pl", "pr", "sh", "sl", "st", "th", "tr",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ea", "ou", "oo"];
const CODAS: &[&str] = &["", "", "n", "r", "l", "s", "t", "m", "nd", "rt", "st", "ck"];

struct SenseSpec {
    key: String,
    topic: usize,
    weight: f64,
}

struct LemmaSpec {
    lemma: String,
    pos: Pos,
    senses: Vec<SenseSpec>,
}

fn pseudo_word<R: Rng>(rng: &mut R) -> String {
    let syllables = rng.gen_range(1..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS[rng.gen_range(0..ONSETS.len())]);
        w.push_str(VOWELS[rng.gen_range(0..VOWELS.len())]);
    }
    w.push_str(CODAS[rng.gen_range(0..CODAS.len())]);
    w
}

fn poisson<R: Rng>(lambda: f64, rng: &mut R) -> usize {
    let limit = (-lambda).exp();
    let mut k = 0;
    let mut p = rng.gen::<f64>();
    while p > limit {
        k += 1;
        p *= rng.gen::<f64>();
    }
    k
}

fn draw_pos<R: Rng>(rng: &mut R) -> Pos {
    match rng.gen::<f64>() {
        x if x < 0.50 => Pos::Noun,
        x if x < 0.75 => Pos::Verb,
        x if x < 0.92 => Pos::Adj,
        _ => Pos::Adv,
    }
}

fn wordnet_pos(pos: Pos) -> u8 {
    match pos {
        Pos::Noun => 1,
        Pos::Verb => 2,
        Pos::Adj => 3,
        Pos::Adv => 4,
        Pos::Other => 5,
    }
}

fn build_lexicon<R: Rng>(config: &SyntheticConfig, rng: &mut R) -> Vec<LemmaSpec> {
    let n = config.content_lemmas;
    let weights: Vec<f64> = (1..=n)
        .map(|r| 1.0 / (r as f64 + config.zipf_offset).powf(config.zipf_exponent))
        .collect();
    let total_weight: f64 = weights.iter().sum();
    let expected_content = config.documents as f64 * config.sentences_per_document as f64 * config.mean_content_words;

    let mut names: HashSet<(String, Pos)> = HashSet::new();
    let mut nouns: Vec<String> = Vec::new();
    let mut lexicon = Vec::with_capacity(n);
    for &weight in &weights {
        let pos = draw_pos(rng);
        let lemma = loop {
            let candidate = if pos != Pos::Noun && !nouns.is_empty() && rng.gen_bool(0.08) {
                nouns[rng.gen_range(0..nouns.len())].clone()
            } else if rng.gen_bool(0.02) {
                format!("{}_{}", pseudo_word(rng), pseudo_word(rng))
            } else {
                pseudo_word(rng)
            };
            if FUNCTION_WORDS.contains(&candidate.as_str()) {
                continue;
            }
            if names.insert((candidate.clone(), pos)) {
                break candidate;
            }
        };
        if pos == Pos::Noun {
            nouns.push(lemma.clone());
        }

        let expected_uses = expected_content * weight / total_weight;
        let lambda = 0.6 * (1.0 + expected_uses / 10.0).ln();
        let n_senses = (1 + poisson(lambda, rng)).min(12);
        let home = rng.gen_range(0..config.topics);
        let mut senses = Vec::with_capacity(n_senses);
        for j in 0..n_senses {
            let topic = if j == 0 {
                home
            } else if rng.gen_bool(config.related_senses) {
                let offset = rng.gen_range(1..=4);
                if rng.gen_bool(0.5) {
                    (home + offset) % config.topics
                } else {
                    (home + config.topics - offset) % config.topics
                }
            } else {
                rng.gen_range(0..config.topics)
            };
            let share = rng.gen_range(0.5..1.5) / ((j + 1) as f64).powf(1.2);
            senses.push(SenseSpec {
                key: format!("{lemma}%{}:{:02}:{:02}::", wordnet_pos(pos), rng.gen_range(0..45), j),
                topic,
                weight: share,
            });
        }
        let share_total: f64 = senses.iter().map(|s| s.weight).sum();
        for s in &mut senses {
            s.weight *= weight / share_total;
        }
        lexicon.push(LemmaSpec { lemma, pos, senses });
    }
    lexicon
}

struct Topic {
    uses: Vec<(usize, usize)>,
    sampler: WeightedIndex<f64>,
}

fn build_topics(config: &SyntheticConfig, lexicon: &[LemmaSpec]) -> (Vec<Option<Topic>>, WeightedIndex<f64>) {
    let mut members: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); config.topics];
    for (li, spec) in lexicon.iter().enumerate() {
        for (si, sense) in spec.senses.iter().enumerate() {
            members[sense.topic].push((li, si, sense.weight));
        }
    }
    let masses: Vec<f64> = members.iter().map(|m| m.iter().map(|x| x.2).sum::<f64>()).collect();
    let topics = members
        .into_iter()
        .map(|m| {
            if m.is_empty() {
                return None;
            }
            let sampler = WeightedIndex::new(m.iter().map(|x| x.2)).expect("positive weights");
            Some(Topic {
                uses: m.into_iter().map(|x| (x.0, x.1)).collect(),
                sampler,
            })
        })
        .collect();
    let topic_sampler = WeightedIndex::new(masses).expect("at least one populated topic");
    (topics, topic_sampler)
}

fn inflect<R: Rng>(lemma: &str, pos: Pos, rng: &mut R) -> String {
    match pos {
        Pos::Noun if rng.gen_bool(0.3) => format!("{lemma}s"),
        Pos::Verb => match rng.gen_range(0..4) {
            0 => format!("{lemma}ed"),
            1 => format!("{lemma}ing"),
            2 => format!("{lemma}s"),
            _ => lemma.to_string(),
        },
        _ => lemma.to_string(),
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Generates a corpus. Identical configurations give identical corpora.
pub fn generate(config: &SyntheticConfig) -> AnnotatedCorpus {
    let mut rng = rng_from_seed(config.seed);
    let lexicon = build_lexicon(config, &mut rng);
    let (topics, topic_sampler) = build_topics(config, &lexicon);
    let function_sampler =
        WeightedIndex::new((1..=FUNCTION_WORDS.len()).map(|r| 1.0 / r as f64)).expect("non-empty list");

    let pick_topic = |t: usize, rng: &mut rand_chacha::ChaCha20Rng| -> usize {
        let x: f64 = rng.gen();
        if x < config.topic_focus {
            t
        } else if x < config.topic_focus + config.neighbour_mix {
            let offset = rng.gen_range(1..=2);
            if rng.gen_bool(0.5) {
                (t + offset) % config.topics
            } else {
                (t + config.topics - offset) % config.topics
            }
        } else {
            topic_sampler.sample(rng)
        }
    };

    let extra = ((config.mean_content_words - 5.0) / 0.47).round().max(0.0) as u32;
    let mut sentences = Vec::with_capacity(config.documents * config.sentences_per_document);
    for doc in 0..config.documents {
        let verbs_only = rng.gen_bool(config.verbs_only_share);
        let doc_topic = topic_sampler.sample(&mut rng);
        for s in 0..config.sentences_per_document {
            let topic = if rng.gen_bool(config.document_focus) {
                doc_topic
            } else {
                topic_sampler.sample(&mut rng)
            };
            let n_content = 5 + (0..extra).filter(|_| rng.gen_bool(0.47)).count();
            let mut tokens = Vec::with_capacity(n_content * 2 + 2);
            for _ in 0..n_content {
                for _ in 0..[0, 1, 1, 2][rng.gen_range(0..4)] {
                    tokens.push(Token::plain(FUNCTION_WORDS[function_sampler.sample(&mut rng)]));
                }
                let from = pick_topic(topic, &mut rng);
                let Some(pool) = &topics[from] else { continue };
                let (li, si) = pool.uses[pool.sampler.sample(&mut rng)];
                let spec = &lexicon[li];
                let surface = inflect(&spec.lemma, spec.pos, &mut rng);
                let eligible = !verbs_only || spec.pos == Pos::Verb;
                let token = if eligible && rng.gen_bool(config.annotation_rate) {
                    Token::annotated(surface, spec.lemma.clone(), spec.pos, spec.senses[si].key.clone())
                } else {
                    Token::plain(surface)
                };
                tokens.push(token);
                if rng.gen_bool(0.08) {
                    tokens.push(Token::plain(","));
                }
            }
            if let Some(first) = tokens.first_mut() {
                first.surface = capitalize(&first.surface);
            }
            tokens.push(Token::plain("."));
            sentences.push(Sentence {
                id: format!("d{doc:03}.s{s:03}"),
                tokens,
            });
        }
    }
    AnnotatedCorpus::new(sentences).expect("generated sentences are well-formed")
}
