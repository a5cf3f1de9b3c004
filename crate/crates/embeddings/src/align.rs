//! Making two spaces comparable: column intersection, orthogonal
//! Procrustes and word injection.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;

use crate::corpus::PlainCorpus;
use crate::error::EmbedError;
use crate::space::{EmbeddingSpace, Vectors};

/// Marker separating a target word from its corpus tag under word injection.
pub const INJECTION_MARKER: char = '@';

pub fn injected(word: &str, corpus: u8) -> String {
    format!("{word}{INJECTION_MARKER}{corpus}")
}

/// Restricts two sparse spaces to the context columns they share, in
/// alphabetical order, so that their rows live in one coordinate system.
pub fn align_ci(a: &EmbeddingSpace, b: &EmbeddingSpace) -> Result<(EmbeddingSpace, EmbeddingSpace), EmbedError> {
    let (Vectors::Sparse { columns: ca, .. }, Vectors::Sparse { columns: cb, .. }) = (a.vectors(), b.vectors())
    else {
        return Err(EmbedError::Incompatible("column intersection needs sparse spaces".into()));
    };
    let in_b: BTreeSet<&str> = cb.iter().map(String::as_str).collect();
    let shared: Vec<String> = ca
        .iter()
        .filter(|c| in_b.contains(c.as_str()))
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if shared.is_empty() {
        return Err(EmbedError::Incompatible("no shared context columns".into()));
    }
    Ok((restrict_columns(a, &shared), restrict_columns(b, &shared)))
}

fn restrict_columns(space: &EmbeddingSpace, shared: &[String]) -> EmbeddingSpace {
    let Vectors::Sparse { matrix, columns } = space.vectors() else {
        unreachable!("checked by caller")
    };
    let position: HashMap<&str, u32> = shared.iter().enumerate().map(|(i, c)| (c.as_str(), i as u32)).collect();
    let mapping: Vec<Option<u32>> = columns.iter().map(|c| position.get(c.as_str()).copied()).collect();
    EmbeddingSpace::sparse(
        space.words().to_vec(),
        matrix.remap_columns(&mapping, shared.len()),
        shared.to_vec(),
    )
}

#[derive(Debug, Clone)]
pub struct OpAlignment {
    /// First space, rows length-normalized.
    pub reference: EmbeddingSpace,
    /// Second space, rows length-normalized and rotated onto the first.
    pub aligned: EmbeddingSpace,
    /// Orthogonal `d × d` matrix applied to the second space's rows.
    pub rotation: DMatrix<f64>,
}

fn normalized_rows(space: &EmbeddingSpace) -> Vec<f64> {
    let d = space.dim();
    let mut out = Vec::with_capacity(space.len() * d);
    for i in 0..space.len() {
        let row = space.dense_row(i).expect("dense space");
        let n = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        out.extend(row.iter().map(|v| if n > 0.0 { v / n } else { 0.0 }));
    }
    out
}

/// Mean-centered matrix of the given rows.
fn centered(rows: &[f64], dim: usize, pick: &[usize]) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(pick.len(), dim, |r, c| rows[pick[r] * dim + c]);
    for c in 0..dim {
        let mean = m.column(c).mean();
        m.column_mut(c).add_scalar_mut(-mean);
    }
    m
}

/// Orthogonal `R` minimizing `‖B R − A‖` over rows of the shared vocabulary.
pub fn procrustes(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = (b.transpose() * a).svd(true, true);
    svd.u.expect("requested U") * svd.v_t.expect("requested Vᵀ")
}

/// Rotates `b` onto `a`. Rows are length-normalized, the shared vocabulary
/// is mean-centered to solve for the rotation, and the rotation is applied
/// to the normalized (uncentered) vectors of every word in `b`.
pub fn align_op(a: &EmbeddingSpace, b: &EmbeddingSpace) -> Result<OpAlignment, EmbedError> {
    if !a.is_dense() || !b.is_dense() {
        return Err(EmbedError::Incompatible("Procrustes alignment needs dense spaces".into()));
    }
    let d = a.dim();
    if b.dim() != d {
        return Err(EmbedError::Incompatible(format!("dimensions {} and {} differ", d, b.dim())));
    }
    let pairs: Vec<(usize, usize)> = a
        .words()
        .iter()
        .enumerate()
        .filter_map(|(i, w)| b.index_of(w).map(|j| (i, j)))
        .collect();
    if pairs.is_empty() {
        return Err(EmbedError::Incompatible("no shared vocabulary".into()));
    }
    let na = normalized_rows(a);
    let nb = normalized_rows(b);
    let ia: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let ib: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let rotation = procrustes(&centered(&na, d, &ia), &centered(&nb, d, &ib));

    let mut rotated = Vec::with_capacity(nb.len());
    for row in nb.chunks_exact(d) {
        for c in 0..d {
            rotated.push((0..d).map(|k| row[k] * rotation[(k, c)]).sum());
        }
    }
    Ok(OpAlignment {
        reference: EmbeddingSpace::dense(a.words().to_vec(), d, na),
        aligned: EmbeddingSpace::dense(b.words().to_vec(), d, rotated),
        rotation,
    })
}

/// Joins both corpora into one, renaming each target `t` to `t@1` in the
/// first and `t@2` in the second so that a single space holds both usages.
pub fn word_injection(c1: &PlainCorpus, c2: &PlainCorpus, targets: &[String]) -> Result<PlainCorpus, EmbedError> {
    if targets.is_empty() {
        return Err(EmbedError::NoTargets);
    }
    if let Some(t) = targets.iter().find(|t| t.contains(INJECTION_MARKER)) {
        return Err(EmbedError::ReservedMarker(t.clone()));
    }
    let targets: BTreeSet<&str> = targets.iter().map(String::as_str).collect();
    let tag = |corpus: &PlainCorpus, n: u8| -> Vec<Vec<String>> {
        corpus
            .sentences
            .iter()
            .map(|s| {
                s.iter()
                    .map(|t| if targets.contains(t.as_str()) { injected(t, n) } else { t.clone() })
                    .collect()
            })
            .collect()
    };
    let mut sentences = tag(c1, 1);
    sentences.extend(tag(c2, 2));
    Ok(PlainCorpus::new(format!("{}+{}", c1.id, c2.id), sentences))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CsrMatrix;

    fn words(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn ci_keeps_shared_columns_only() {
        let a = EmbeddingSpace::sparse(
            words(&["x"]),
            CsrMatrix::from_rows(3, vec![vec![(0, 1.0), (1, 2.0), (2, 3.0)]]),
            words(&["c", "a", "z"]),
        );
        let b = EmbeddingSpace::sparse(
            words(&["y"]),
            CsrMatrix::from_rows(2, vec![vec![(0, 5.0), (1, 7.0)]]),
            words(&["a", "c"]),
        );
        let (a2, b2) = align_ci(&a, &b).unwrap();
        assert_eq!(a2.dim(), 2);
        // columns a, c
        assert_eq!(a2.dots_from(0), vec![4.0 + 1.0]);
        assert_eq!(a2.dot_with(0, &b2, 0), Some(2.0 * 5.0 + 1.0 * 7.0));
    }

    #[test]
    fn identical_spaces_give_identity_rotation() {
        let a = EmbeddingSpace::dense(words(&["p", "q", "r"]), 2, vec![1.0, 0.2, -0.3, 1.0, 0.5, 0.5]);
        let op = align_op(&a, &a).unwrap();
        assert!((op.rotation - DMatrix::identity(2, 2)).norm() < 1e-9);
    }

    #[test]
    fn injection_tags_targets_per_corpus() {
        let c1 = PlainCorpus::new("c1", vec![words(&["a", "t"])]);
        let c2 = PlainCorpus::new("c2", vec![words(&["t", "b"])]);
        let wi = word_injection(&c1, &c2, &words(&["t"])).unwrap();
        assert_eq!(wi.sentences, vec![words(&["a", "t@1"]), words(&["t@2", "b"])]);
        assert!(matches!(word_injection(&c1, &c2, &[]), Err(EmbedError::NoTargets)));
        assert!(matches!(
            word_injection(&c1, &c2, &words(&["t@x"])),
            Err(EmbedError::ReservedMarker(_))
        ));
    }
}
