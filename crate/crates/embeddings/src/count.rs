//! Windowed co-occurrence counts and positive pointwise mutual information.

use std::collections::HashMap;

use crate::corpus::{PlainCorpus, Vocabulary};
use crate::error::EmbedError;
use crate::space::{EmbeddingSpace, Vectors};
use crate::sparse::CsrMatrix;

pub const DEFAULT_WINDOW: usize = 10;

/// Counts, for every word, the tokens within `window` positions on either
/// side in the same sentence. Rows and columns share the corpus vocabulary.
pub fn cooccurrence_counts(corpus: &PlainCorpus, window: usize) -> Result<(Vocabulary, CsrMatrix), EmbedError> {
    let vocab = Vocabulary::from_corpus(corpus);
    if vocab.is_empty() {
        return Err(EmbedError::EmptyCorpus(corpus.id.clone()));
    }
    let mut rows: Vec<HashMap<u32, f64>> = vec![HashMap::new(); vocab.len()];
    for sentence in vocab.encode(corpus) {
        let n = sentence.len();
        for (i, &w) in sentence.iter().enumerate() {
            let lo = i.saturating_sub(window);
            let hi = (i + window + 1).min(n);
            let row = &mut rows[w as usize];
            for (j, &c) in sentence[lo..hi].iter().enumerate() {
                if lo + j != i {
                    *row.entry(c).or_default() += 1.0;
                }
            }
        }
    }
    let rows = rows.into_iter().map(|r| r.into_iter().collect()).collect();
    Ok((vocab.clone(), CsrMatrix::from_rows(vocab.len(), rows)))
}

pub fn count_space(corpus: &PlainCorpus, window: usize) -> Result<EmbeddingSpace, EmbedError> {
    let (vocab, matrix) = cooccurrence_counts(corpus, window)?;
    let words = vocab.words().to_vec();
    Ok(EmbeddingSpace::sparse(words.clone(), matrix, words))
}

/// `max(0, ln(c·T / (r_i·c_j)))` for every non-zero cell; zero cells stay zero.
pub fn ppmi_matrix(counts: &CsrMatrix) -> CsrMatrix {
    let total = counts.sum();
    let rows = counts.row_sums();
    let cols = counts.col_sums();
    counts.map_entries(|i, j, c| (c * total / (rows[i] * cols[j])).ln().max(0.0))
}

pub fn ppmi_space(counts: &EmbeddingSpace) -> Result<EmbeddingSpace, EmbedError> {
    match counts.vectors() {
        Vectors::Sparse { matrix, columns } => Ok(EmbeddingSpace::sparse(
            counts.words().to_vec(),
            ppmi_matrix(matrix),
            columns.clone(),
        )),
        Vectors::Dense { .. } => Err(EmbedError::Incompatible("PPMI needs a count matrix".into())),
    }
}
