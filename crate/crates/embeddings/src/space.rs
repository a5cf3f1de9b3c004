//! Word vector spaces: sparse count-based rows or dense embeddings.

use std::collections::HashMap;

use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Vectors {
    /// Row-major `rows × dim` values.
    Dense { dim: usize, data: Vec<f64> },
    /// Rows over a named column space (`columns`).
    Sparse { matrix: CsrMatrix, columns: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vectors,
}

impl EmbeddingSpace {
    pub fn dense(words: Vec<String>, dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(words.len() * dim, data.len(), "dense data does not match words × dim");
        EmbeddingSpace::with_vectors(words, Vectors::Dense { dim, data })
    }

    pub fn sparse(words: Vec<String>, matrix: CsrMatrix, columns: Vec<String>) -> Self {
        assert_eq!(words.len(), matrix.rows());
        assert_eq!(columns.len(), matrix.cols());
        EmbeddingSpace::with_vectors(words, Vectors::Sparse { matrix, columns })
    }

    fn with_vectors(words: Vec<String>, vectors: Vectors) -> Self {
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        EmbeddingSpace {
            words,
            index,
            vectors,
        }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn vectors(&self) -> &Vectors {
        &self.vectors
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Dimensionality: embedding size for dense spaces, column count for sparse ones.
    pub fn dim(&self) -> usize {
        match &self.vectors {
            Vectors::Dense { dim, .. } => *dim,
            Vectors::Sparse { matrix, .. } => matrix.cols(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.vectors, Vectors::Dense { .. })
    }

    /// Dense row slice; `None` for sparse spaces.
    pub fn dense_row(&self, i: usize) -> Option<&[f64]> {
        match &self.vectors {
            Vectors::Dense { dim, data } => Some(&data[i * dim..(i + 1) * dim]),
            Vectors::Sparse { .. } => None,
        }
    }

    pub fn norm(&self, i: usize) -> f64 {
        match &self.vectors {
            Vectors::Dense { .. } => {
                let r = self.dense_row(i).expect("dense");
                r.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            Vectors::Sparse { matrix, .. } => matrix.row_norm(i),
        }
    }

    /// Dot product between row `i` here and row `j` of `other`. Returns
    /// `None` when the two spaces do not share a coordinate system.
    pub fn dot_with(&self, i: usize, other: &EmbeddingSpace, j: usize) -> Option<f64> {
        match (&self.vectors, &other.vectors) {
            (Vectors::Dense { dim: da, .. }, Vectors::Dense { dim: db, .. }) if da == db => {
                let a = self.dense_row(i)?;
                let b = other.dense_row(j)?;
                Some(a.iter().zip(b).map(|(x, y)| x * y).sum())
            }
            (Vectors::Sparse { matrix: ma, columns: ca }, Vectors::Sparse { matrix: mb, columns: cb })
                if ca == cb =>
            {
                Some(ma.row_dot(i, mb, j))
            }
            _ => None,
        }
    }

    /// Dot products of row `i` with every row of this space.
    pub fn dots_from(&self, i: usize) -> Vec<f64> {
        match &self.vectors {
            Vectors::Dense { dim, data } => {
                let q = &data[i * dim..(i + 1) * dim];
                data.chunks_exact(*dim)
                    .map(|r| r.iter().zip(q).map(|(x, y)| x * y).sum())
                    .collect()
            }
            Vectors::Sparse { matrix, .. } => {
                let mut q = vec![0.0; matrix.cols()];
                let (idx, val) = matrix.row(i);
                for (&c, &v) in idx.iter().zip(val) {
                    q[c as usize] = v;
                }
                matrix.mul_vec(&q)
            }
        }
    }

    /// Cosine similarities of row `i` with every row (0 for zero rows).
    pub fn cosines_from(&self, i: usize, norms: &[f64]) -> Vec<f64> {
        let ni = norms[i];
        self.dots_from(i)
            .into_iter()
            .zip(norms)
            .map(|(d, &n)| if ni > 0.0 && n > 0.0 { d / (ni * n) } else { 0.0 })
            .collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.norm(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sparse_agree() {
        let words: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let d = EmbeddingSpace::dense(words.clone(), 2, vec![1.0, 0.0, 3.0, 4.0]);
        let m = CsrMatrix::from_rows(2, vec![vec![(0, 1.0)], vec![(0, 3.0), (1, 4.0)]]);
        let s = EmbeddingSpace::sparse(words, m, vec!["x".into(), "y".into()]);
        assert_eq!(d.dots_from(1), s.dots_from(1));
        assert_eq!(d.norm(1), 5.0);
        assert_eq!(s.norm(1), 5.0);
        assert_eq!(d.dot_with(0, &d, 1), Some(3.0));
        assert_eq!(d.dot_with(0, &s, 1), None);
        assert_eq!(s.cosines_from(0, &s.norms()), vec![1.0, 0.6]);
    }
}
