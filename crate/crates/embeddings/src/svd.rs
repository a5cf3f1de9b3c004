//! Truncated singular value decomposition of sparse matrices.
//!
//! Small matrices are decomposed exactly through a dense SVD. Larger ones
//! use a randomized range finder with power iterations, which is accurate
//! for the leading components and never materializes the dense matrix.

use nalgebra::DMatrix;
use rand::Rng;

use lscsim_core::rng::rng_from_seed;

use crate::error::EmbedError;
use crate::space::{EmbeddingSpace, Vectors};
use crate::sparse::CsrMatrix;

/// Matrices with both sides up to this size go through the exact path.
pub const EXACT_LIMIT: usize = 600;
const OVERSAMPLE: usize = 10;
const POWER_ITERATIONS: usize = 5;

#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    /// `rows × d` left singular vectors.
    pub u: DMatrix<f64>,
    /// Descending singular values.
    pub s: Vec<f64>,
    /// `d × cols` right singular vectors, transposed.
    pub vt: DMatrix<f64>,
}

impl TruncatedSvd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.s));
        &self.u * sigma * &self.vt
    }
}

pub fn truncated_svd(m: &CsrMatrix, d: usize, seed: u64) -> Result<TruncatedSvd, EmbedError> {
    let limit = m.rows().min(m.cols());
    if d == 0 || d > limit {
        return Err(EmbedError::InvalidConfig(format!(
            "SVD dimension {d} outside 1..={limit}"
        )));
    }
    let svd = if m.rows().max(m.cols()) <= EXACT_LIMIT {
        exact(m, d)
    } else {
        randomized(m, d, seed)
    };
    Ok(fix_signs(svd))
}

fn exact(m: &CsrMatrix, d: usize) -> TruncatedSvd {
    let svd = m.to_dense().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    select(&u, svd.singular_values.as_slice(), &vt, d)
}

/// Keeps the `d` largest singular triplets, in descending order.
fn select(u: &DMatrix<f64>, s: &[f64], vt: &DMatrix<f64>, d: usize) -> TruncatedSvd {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    order.truncate(d);
    TruncatedSvd {
        u: u.select_columns(&order),
        s: order.iter().map(|&i| s[i]).collect(),
        vt: vt.select_rows(&order),
    }
}

fn orthonormal_basis(y: DMatrix<f64>) -> DMatrix<f64> {
    y.qr().q()
}

fn randomized(m: &CsrMatrix, d: usize, seed: u64) -> TruncatedSvd {
    let k = (d + OVERSAMPLE).min(m.rows().min(m.cols()));
    let mut rng = rng_from_seed(seed);
    let omega = DMatrix::from_fn(m.cols(), k, |_, _| rng.gen_range(-1.0..1.0));
    let mut q = orthonormal_basis(m.mul_dense(&omega));
    for _ in 0..POWER_ITERATIONS {
        let z = orthonormal_basis(m.tr_mul_dense(&q));
        q = orthonormal_basis(m.mul_dense(&z));
    }
    // B = Qᵀ A, decomposed through its tall transpose Bᵀ = Aᵀ Q = U' Σ V'ᵀ
    let bt = m.tr_mul_dense(&q);
    let svd = bt.svd(true, true);
    let u_small = svd.v_t.expect("requested Vᵀ").transpose();
    let vt = svd.u.expect("requested U").transpose();
    select(&(&q * u_small), svd.singular_values.as_slice(), &vt, d)
}

/// Makes each component's largest-magnitude left entry positive so that
/// results do not depend on the solver's arbitrary sign choices.
fn fix_signs(mut svd: TruncatedSvd) -> TruncatedSvd {
    for c in 0..svd.s.len() {
        let col = svd.u.column(c);
        let pivot = col.iter().copied().fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
        if pivot < 0.0 {
            svd.u.column_mut(c).neg_mut();
            svd.vt.row_mut(c).neg_mut();
        }
    }
    svd
}

/// Dense `d`-dimensional word vectors `U_d Σ_d` from a sparse space.
pub fn svd_space(space: &EmbeddingSpace, d: usize, seed: u64) -> Result<EmbeddingSpace, EmbedError> {
    let Vectors::Sparse { matrix, .. } = space.vectors() else {
        return Err(EmbedError::Incompatible("SVD needs a sparse matrix".into()));
    };
    let svd = truncated_svd(matrix, d, seed)?;
    let mut data = Vec::with_capacity(space.len() * d);
    for r in 0..space.len() {
        for c in 0..d {
            data.push(svd.u[(r, c)] * svd.s[c]);
        }
    }
    Ok(EmbeddingSpace::dense(space.words().to_vec(), d, data))
}
