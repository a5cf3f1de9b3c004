//! Skip-gram with negative sampling.
//!
//! The per-pair loss and gradient are generic over the float type so they
//! can be checked numerically in `f64`; training itself runs in `f32`.

use num_traits::Float;
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_distr::WeightedAliasIndex;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::corpus::{PlainCorpus, Vocabulary};
use crate::count::DEFAULT_WINDOW;
use crate::error::EmbedError;
use crate::space::EmbeddingSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    /// Maximum distance to a context word; the effective window of each
    /// token is drawn uniformly from `1..=window`.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate, decayed linearly towards zero.
    pub learning_rate: f64,
    /// Exponent applied to unigram counts in the noise distribution.
    pub noise_exponent: f64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 100,
            window: DEFAULT_WINDOW,
            negatives: 5,
            epochs: 30,
            learning_rate: 0.025,
            noise_exponent: 0.75,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |m: &str| Err(EmbedError::InvalidConfig(m.to_string()));
        if self.dim == 0 {
            return bad("SGNS dimension must be positive");
        }
        if self.window == 0 {
            return bad("SGNS window must be positive");
        }
        if self.epochs == 0 {
            return bad("SGNS needs at least one epoch");
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad("SGNS learning rate must be positive");
        }
        Ok(())
    }
}

const MIN_LR_FRACTION: f64 = 1e-4;

/// Training draws several random numbers per token pair, so it uses a
/// small fast generator rather than the pipeline's cryptographic one.
pub const TRAINING_RNG: &str = "xoshiro256++ (rand_xoshiro 0.6)";

fn sigmoid<T: Float>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// Eight independent partial sums so the loop vectorizes.
fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .fold(T::zero(), |s, (&x, &y)| s + x * y);
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] = acc[k] + x[k] * y[k];
        }
    }
    acc.iter().fold(tail, |s, &v| s + v)
}

/// `-ln σ(w·c) - Σ ln σ(-w·n)` for one input vector, its true context and sampled noise words.
pub fn pair_loss<T: Float>(input: &[T], context: &[T], negatives: &[&[T]]) -> T {
    let mut loss = -sigmoid(dot(input, context)).ln();
    for n in negatives {
        loss = loss - sigmoid(-dot(input, n)).ln();
    }
    loss
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient<T> {
    pub input: Vec<T>,
    pub context: Vec<T>,
    pub negatives: Vec<Vec<T>>,
}

/// Analytic gradient of [`pair_loss`].
pub fn pair_gradient<T: Float>(input: &[T], context: &[T], negatives: &[&[T]]) -> PairGradient<T> {
    let g_pos = sigmoid(dot(input, context)) - T::one();
    let mut g_input: Vec<T> = context.iter().map(|&c| g_pos * c).collect();
    let mut g_negs = Vec::with_capacity(negatives.len());
    for n in negatives {
        let g = sigmoid(dot(input, n));
        for (gi, &nv) in g_input.iter_mut().zip(n.iter()) {
            *gi = *gi + g * nv;
        }
        g_negs.push(input.iter().map(|&w| g * w).collect());
    }
    PairGradient {
        input: g_input,
        context: input.iter().map(|&w| g_pos * w).collect(),
        negatives: g_negs,
    }
}

/// One SGD update for an input row against rows of the output matrix:
/// the context row with label 1 and each noise row with label 0. Output
/// rows are updated in turn; the input row is updated once at the end.
pub fn sgd_step<T: Float>(
    input: &mut [T],
    outputs: &mut [T],
    context: usize,
    negatives: &[usize],
    lr: T,
    scratch: &mut [T],
) {
    let dim = input.len();
    scratch.iter_mut().for_each(|s| *s = T::zero());
    let targets = std::iter::once((context, T::one())).chain(negatives.iter().map(|&n| (n, T::zero())));
    for (o, label) in targets {
        let row = &mut outputs[o * dim..(o + 1) * dim];
        let g = (label - sigmoid(dot(input, row))) * lr;
        let scratch = &mut scratch[..dim];
        for k in 0..dim {
            scratch[k] = scratch[k] + g * row[k];
            row[k] = row[k] + g * input[k];
        }
    }
    for k in 0..dim {
        input[k] = input[k] + scratch[k];
    }
}

/// Noise sampler with probabilities proportional to `count^exponent`.
fn noise_distribution(counts: &[u64], exponent: f64) -> WeightedAliasIndex<f64> {
    let weights = counts.iter().map(|&c| (c as f64).powf(exponent)).collect();
    WeightedAliasIndex::new(weights).expect("non-empty vocabulary with positive counts")
}

/// Trains input vectors on one corpus. Identical seeds give identical vectors.
pub fn train(corpus: &PlainCorpus, config: &SgnsConfig, seed: u64) -> Result<EmbeddingSpace, EmbedError> {
    config.validate()?;
    let vocab = Vocabulary::from_corpus(corpus);
    if vocab.is_empty() {
        return Err(EmbedError::EmptyCorpus(corpus.id.clone()));
    }
    let dim = config.dim;
    let sentences = vocab.encode(corpus);
    let noise = noise_distribution(vocab.counts(), config.noise_exponent);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);

    let bound = 0.5 / dim as f32;
    let mut input: Vec<f32> = (0..vocab.len() * dim).map(|_| rng.gen_range(-bound..=bound)).collect();
    let mut output = vec![0f32; vocab.len() * dim];
    let mut scratch = vec![0f32; dim];
    let mut negs = Vec::with_capacity(config.negatives);

    let total = (corpus.token_count() * config.epochs) as f64;
    let lr0 = config.learning_rate;
    let mut seen = 0usize;
    for _ in 0..config.epochs {
        for sentence in &sentences {
            for (i, &w) in sentence.iter().enumerate() {
                let lr = (lr0 * (1.0 - seen as f64 / total)).max(lr0 * MIN_LR_FRACTION) as f32;
                seen += 1;
                let span = rng.gen_range(1..=config.window);
                let lo = i.saturating_sub(span);
                let hi = (i + span + 1).min(sentence.len());
                for (j, &c) in sentence.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    negs.clear();
                    for _ in 0..config.negatives {
                        let n = noise.sample(&mut rng) as u32;
                        if n != c {
                            negs.push(n as usize);
                        }
                    }
                    let row = &mut input[w as usize * dim..(w as usize + 1) * dim];
                    sgd_step(row, &mut output, c as usize, &negs, lr, &mut scratch);
                }
            }
        }
    }
    Ok(EmbeddingSpace::dense(
        vocab.words().to_vec(),
        dim,
        input.into_iter().map(f64::from).collect(),
    ))
}
