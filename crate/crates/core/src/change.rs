//! Sense frequency distributions and the change scores derived from them.

use std::collections::HashMap;

use thiserror::Error;

use crate::corpus::{LemmaKey, SenseKey};

/// Default probability threshold for binary change.
pub const DEFAULT_K: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("sense {sense} is not in the sense sequence of {lemma}")]
    UnknownSense { lemma: LemmaKey, sense: SenseKey },
    #[error("cannot normalize an all-zero distribution for {0}")]
    EmptyDistribution(LemmaKey),
    #[error("distributions have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("distributions for {0} and {1} are over different sense sequences")]
    SenseMismatch(LemmaKey, LemmaKey),
    #[error("relative error is undefined without annotated uses")]
    NoAnnotatedUses,
}

/// Per-sense use counts over a fixed sense sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseFrequencyDistribution {
    pub lemma: LemmaKey,
    pub senses: Vec<SenseKey>,
    pub counts: Vec<u64>,
}

impl SenseFrequencyDistribution {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn from_counts(lemma: LemmaKey, senses: Vec<SenseKey>, counts: Vec<u64>) -> Result<Self, MetricError> {
        if senses.len() != counts.len() {
            return Err(MetricError::LengthMismatch(senses.len(), counts.len()));
        }
        Ok(SenseFrequencyDistribution { lemma, senses, counts })
    }

    fn check_compatible(&self, other: &Self) -> Result<(), MetricError> {
        if self.lemma != other.lemma || self.senses != other.senses {
            return Err(MetricError::SenseMismatch(self.lemma.clone(), other.lemma.clone()));
        }
        Ok(())
    }
}

/// Counts how often each sense of `senses` occurs among `uses`.
pub fn build_sfd<'a, I>(lemma: &LemmaKey, uses: I, senses: &[SenseKey]) -> Result<SenseFrequencyDistribution, MetricError>
where
    I: IntoIterator<Item = &'a SenseKey>,
{
    let slot: HashMap<&SenseKey, usize> = senses.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut counts = vec![0u64; senses.len()];
    for sense in uses {
        let i = *slot.get(sense).ok_or_else(|| MetricError::UnknownSense {
            lemma: lemma.clone(),
            sense: sense.clone(),
        })?;
        counts[i] += 1;
    }
    Ok(SenseFrequencyDistribution {
        lemma: lemma.clone(),
        senses: senses.to_vec(),
        counts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution(Vec<f64>);

impl ProbabilityDistribution {
    /// Wraps raw probabilities. They must be non-negative and sum to one;
    /// this is checked only in debug builds.
    pub fn new(probs: Vec<f64>) -> Self {
        debug_assert!(probs.iter().all(|&p| p >= 0.0));
        debug_assert!(probs.is_empty() || (probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        ProbabilityDistribution(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn normalize(sfd: &SenseFrequencyDistribution) -> Result<ProbabilityDistribution, MetricError> {
    let total = sfd.total();
    if total == 0 {
        return Err(MetricError::EmptyDistribution(sfd.lemma.clone()));
    }
    let total = total as f64;
    Ok(ProbabilityDistribution(sfd.counts.iter().map(|&c| c as f64 / total).collect()))
}

/// `p·log2(p/m)` with the convention `0·log 0 = 0`.
fn kl_term(p: f64, m: f64) -> f64 {
    if p > 0.0 {
        p * (p / m).log2()
    } else {
        0.0
    }
}

/// Jensen-Shannon distance with base-2 logarithms, so the result lies in [0, 1].
pub fn jsd(p: &ProbabilityDistribution, q: &ProbabilityDistribution) -> Result<f64, MetricError> {
    if p.len() != q.len() {
        return Err(MetricError::LengthMismatch(p.len(), q.len()));
    }
    let pairs = p.0.iter().zip(&q.0);
    // Disjoint supports give exactly 1; summing the halves of p and q would
    // otherwise leave rounding error behind.
    if pairs.clone().all(|(&a, &b)| a == 0.0 || b == 0.0) && !p.is_empty() {
        return Ok(1.0);
    }
    let mut divergence = 0.0;
    for (&a, &b) in pairs {
        let m = 0.5 * (a + b);
        divergence += 0.5 * kl_term(a, m) + 0.5 * kl_term(b, m);
    }
    Ok(divergence.clamp(0.0, 1.0).sqrt())
}

/// Graded change G(w): Jensen-Shannon distance between the normalized SFDs.
pub fn graded_change(t1: &SenseFrequencyDistribution, t2: &SenseFrequencyDistribution) -> Result<f64, MetricError> {
    t1.check_compatible(t2)?;
    jsd(&normalize(t1)?, &normalize(t2)?)
}

/// Binary change B(w): 1 iff some sense is absent on one side and has
/// probability at least `k` on the other. Absence is tested on counts.
pub fn binary_change(t1: &SenseFrequencyDistribution, t2: &SenseFrequencyDistribution, k: f64) -> Result<u8, MetricError> {
    t1.check_compatible(t2)?;
    let (n1, n2) = (t1.total(), t2.total());
    if n1 == 0 {
        return Err(MetricError::EmptyDistribution(t1.lemma.clone()));
    }
    if n2 == 0 {
        return Err(MetricError::EmptyDistribution(t2.lemma.clone()));
    }
    let gained_or_lost = t1.counts.iter().zip(&t2.counts).any(|(&c1, &c2)| {
        (c1 == 0 && c2 as f64 / n2 as f64 >= k) || (c2 == 0 && c1 as f64 / n1 as f64 >= k)
    });
    Ok(u8::from(gained_or_lost))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeScores {
    pub graded: f64,
    pub binary: u8,
    pub threshold_k: f64,
}

pub fn change_scores(
    t1: &SenseFrequencyDistribution,
    t2: &SenseFrequencyDistribution,
    k: f64,
) -> Result<ChangeScores, MetricError> {
    Ok(ChangeScores {
        graded: graded_change(t1, t2)?,
        binary: binary_change(t1, t2, k)?,
        threshold_k: k,
    })
}

/// RE(w) = (#(w) - #annotated(w)) / #annotated(w).
pub fn relative_error(total: u64, annotated: u64) -> Result<f64, MetricError> {
    if annotated == 0 {
        return Err(MetricError::NoAnnotatedUses);
    }
    Ok((total as f64 - annotated as f64) / annotated as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Pos;

    fn key() -> LemmaKey {
        LemmaKey::new("plant", Pos::Noun)
    }

    fn senses(n: usize) -> Vec<SenseKey> {
        (1..=n).map(|i| SenseKey::new(format!("s{i}"))).collect()
    }

    fn sfd(counts: &[u64]) -> SenseFrequencyDistribution {
        SenseFrequencyDistribution::from_counts(key(), senses(counts.len()), counts.to_vec()).unwrap()
    }

    fn pd(p: &[f64]) -> ProbabilityDistribution {
        ProbabilityDistribution::new(p.to_vec())
    }

    #[test]
    fn build_plant_sfd() {
        let s = senses(2);
        let uses = [&s[0], &s[0], &s[1], &s[1], &s[0]];
        assert_eq!(build_sfd(&key(), uses, &s).unwrap().counts, vec![3, 2]);
        assert_eq!(build_sfd(&key(), [], &s).unwrap().counts, vec![0, 0]);
        assert_eq!(build_sfd(&key(), [&s[1], &s[1]], &s).unwrap().counts, vec![0, 2]);
    }

    #[test]
    fn build_rejects_foreign_sense() {
        let s = senses(2);
        let stray = SenseKey::new("s9");
        let err = build_sfd(&key(), [&stray], &s).unwrap_err();
        assert!(matches!(err, MetricError::UnknownSense { .. }));
    }

    #[test]
    fn normalize_values() {
        assert_eq!(normalize(&sfd(&[3, 2])).unwrap().probs(), &[0.6, 0.4]);
        assert_eq!(normalize(&sfd(&[0, 2])).unwrap().probs(), &[0.0, 1.0]);
        assert_eq!(normalize(&sfd(&[2, 1])).unwrap().probs(), &[2.0 / 3.0, 1.0 / 3.0]);
        assert!(matches!(normalize(&sfd(&[0, 0])), Err(MetricError::EmptyDistribution(_))));
    }

    #[test]
    fn jsd_examples() {
        assert_eq!(jsd(&pd(&[0.3, 0.7]), &pd(&[0.3, 0.7])).unwrap(), 0.0);
        assert_eq!(jsd(&pd(&[0.0, 1.0]), &pd(&[1.0, 0.0])).unwrap(), 1.0);
        // direct evaluation of the base-2 formula:
        // m = (7/12, 5/12); JS = 1/2 [2/3 log2(8/7) + 1/3 log2(4/5)] + 1/2 [1/2 log2(6/7) + 1/2 log2(6/5)]
        let m: [f64; 2] = [7.0 / 12.0, 5.0 / 12.0];
        let oracle = (0.5
            * ((2.0 / 3.0) * ((2.0 / 3.0) / m[0]).log2()
                + (1.0 / 3.0) * ((1.0 / 3.0) / m[1]).log2()
                + 0.5 * (0.5 / m[0]).log2()
                + 0.5 * (0.5 / m[1]).log2()))
        .sqrt();
        let got = jsd(&pd(&[2.0 / 3.0, 1.0 / 3.0]), &pd(&[0.5, 0.5])).unwrap();
        assert!((got - oracle).abs() < 1e-15);
        assert!((got - 0.1439).abs() < 5e-4, "{got}");
        assert!(matches!(jsd(&pd(&[1.0]), &pd(&[0.5, 0.5])), Err(MetricError::LengthMismatch(1, 2))));
    }

    #[test]
    fn graded_examples() {
        assert_eq!(graded_change(&sfd(&[0, 2]), &sfd(&[3, 0])).unwrap(), 1.0);
        let g = graded_change(&sfd(&[2, 1]), &sfd(&[1, 1])).unwrap();
        assert_eq!((g * 100.0).round() / 100.0, 0.14);
        assert_eq!(graded_change(&sfd(&[5, 5]), &sfd(&[5, 5])).unwrap(), 0.0);
    }

    #[test]
    fn graded_rejects_mismatched_sequences() {
        let other = SenseFrequencyDistribution::from_counts(key(), senses(3), vec![1, 1, 1]).unwrap();
        assert!(matches!(graded_change(&sfd(&[1, 1]), &other), Err(MetricError::SenseMismatch(..))));
        let other_lemma =
            SenseFrequencyDistribution::from_counts(LemmaKey::new("bank", Pos::Noun), senses(2), vec![1, 1]).unwrap();
        assert!(binary_change(&sfd(&[1, 1]), &other_lemma, DEFAULT_K).is_err());
    }

    #[test]
    fn binary_examples() {
        assert_eq!(binary_change(&sfd(&[0, 2]), &sfd(&[3, 0]), DEFAULT_K).unwrap(), 1);
        assert_eq!(binary_change(&sfd(&[2, 1]), &sfd(&[1, 1]), DEFAULT_K).unwrap(), 0);
        assert_eq!(binary_change(&sfd(&[19, 1]), &sfd(&[20, 0]), DEFAULT_K).unwrap(), 0);
        assert_eq!(binary_change(&sfd(&[9, 1]), &sfd(&[10, 0]), DEFAULT_K).unwrap(), 1);
        assert_eq!(binary_change(&sfd(&[10, 0]), &sfd(&[9, 1]), DEFAULT_K).unwrap(), 1);
    }

    #[test]
    fn senses_absent_on_both_sides_are_inert() {
        assert_eq!(binary_change(&sfd(&[3, 0, 1]), &sfd(&[2, 0, 2]), DEFAULT_K).unwrap(), 0);
        let with = graded_change(&sfd(&[3, 0, 1]), &sfd(&[2, 0, 2])).unwrap();
        let without = graded_change(&sfd(&[3, 1]), &sfd(&[2, 2])).unwrap();
        assert!((with - without).abs() < 1e-15);
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(60, 40).unwrap(), 0.5);
        assert_eq!(relative_error(40, 40).unwrap(), 0.0);
        assert_eq!(relative_error(90, 60).unwrap(), 0.5);
        assert_eq!(relative_error(10, 0), Err(MetricError::NoAnnotatedUses));
    }
}
