//! Change measures between a word's vectors in two comparable spaces.

use crate::align::INJECTION_MARKER;
use crate::error::EmbedError;
use crate::space::EmbeddingSpace;

pub const DEFAULT_K_NN: usize = 25;

fn lookup(space: &EmbeddingSpace, word: &str) -> Result<usize, EmbedError> {
    let i = space.index_of(word).ok_or_else(|| EmbedError::UnknownWord(word.to_string()))?;
    if space.norm(i) == 0.0 {
        return Err(EmbedError::ZeroVector(word.to_string()));
    }
    Ok(i)
}

/// `1 − cos(a[wa], b[wb])`.
pub fn cosine_distance(a: &EmbeddingSpace, wa: &str, b: &EmbeddingSpace, wb: &str) -> Result<f64, EmbedError> {
    let i = lookup(a, wa)?;
    let j = lookup(b, wb)?;
    let dot = a
        .dot_with(i, b, j)
        .ok_or_else(|| EmbedError::Incompatible("vectors live in different coordinate systems".into()))?;
    let cos = dot / (a.norm(i) * b.norm(j));
    Ok(1.0 - cos.clamp(-1.0, 1.0))
}

/// Local neighbourhood distance between two spaces. Neighbour candidates
/// are the words present in both spaces, minus injected target tokens.
pub struct LocalNeighbourhood<'a> {
    a: &'a EmbeddingSpace,
    b: &'a EmbeddingSpace,
    norms_a: Vec<f64>,
    norms_b: Vec<f64>,
    /// `(index in a, index in b)` of each candidate, in `a`'s order.
    shared: Vec<(usize, usize)>,
    k: usize,
}

impl<'a> LocalNeighbourhood<'a> {
    pub fn new(a: &'a EmbeddingSpace, b: &'a EmbeddingSpace, k: usize) -> Result<Self, EmbedError> {
        if k == 0 {
            return Err(EmbedError::InvalidConfig("k_nn must be positive".into()));
        }
        let shared = a
            .words()
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.contains(INJECTION_MARKER))
            .filter_map(|(i, w)| b.index_of(w).map(|j| (i, j)))
            .collect();
        Ok(LocalNeighbourhood {
            a,
            b,
            norms_a: a.norms(),
            norms_b: b.norms(),
            shared,
            k,
        })
    }

    pub fn distance(&self, wa: &str, wb: &str) -> Result<f64, EmbedError> {
        let i = lookup(self.a, wa)?;
        let j = lookup(self.b, wb)?;
        let cand: Vec<(usize, usize)> = self
            .shared
            .iter()
            .copied()
            .filter(|&(x, y)| x != i && y != j && self.a.words()[x] != wb && self.a.words()[x] != wa)
            .collect();
        if cand.len() < self.k {
            return Err(EmbedError::TooFewNeighbours {
                needed: self.k,
                available: cand.len(),
            });
        }
        let sim_a = self.a.cosines_from(i, &self.norms_a);
        let sim_b = self.b.cosines_from(j, &self.norms_b);
        let sa: Vec<f64> = cand.iter().map(|&(x, _)| sim_a[x]).collect();
        let sb: Vec<f64> = cand.iter().map(|&(_, y)| sim_b[y]).collect();

        let mut union = top_k(&sa, self.k);
        union.extend(top_k(&sb, self.k));
        union.sort_unstable();
        union.dedup();
        let va: Vec<f64> = union.iter().map(|&n| sa[n]).collect();
        let vb: Vec<f64> = union.iter().map(|&n| sb[n]).collect();
        Ok(1.0 - cosine(&va, &vb))
    }
}

/// Positions of the `k` largest values; ties go to the earlier position.
fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    let k = k.min(order.len());
    if k == 0 {
        return Vec::new();
    }
    let cmp = |x: &usize, y: &usize| values[*y].total_cmp(&values[*x]).then(x.cmp(y));
    order.select_nth_unstable_by(k - 1, cmp);
    order.truncate(k);
    order
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

pub fn lnd(a: &EmbeddingSpace, wa: &str, b: &EmbeddingSpace, wb: &str, k: usize) -> Result<f64, EmbedError> {
    LocalNeighbourhood::new(a, b, k)?.distance(wa, wb)
}
