//! Compressed sparse row matrices, just enough for co-occurrence work.

use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    /// Builds a matrix from per-row `(column, value)` lists. Entries are
    /// sorted by column; duplicate columns are summed and zeros dropped.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let n_rows = rows.len();
        for mut row in rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut last: Option<u32> = None;
            for (c, v) in row {
                assert!((c as usize) < cols, "column {c} out of bounds ({cols})");
                if last == Some(c) {
                    *data.last_mut().expect("previous entry") += v;
                } else {
                    indices.push(c);
                    data.push(v);
                    last = Some(c);
                }
            }
            indptr.push(indices.len());
        }
        let mut m = CsrMatrix {
            rows: n_rows,
            cols,
            indptr,
            indices,
            data,
        };
        m.prune_zeros();
        m
    }

    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let rows = (0..dense.nrows())
            .map(|i| {
                (0..dense.ncols())
                    .filter(|&j| dense[(i, j)] != 0.0)
                    .map(|j| (j as u32, dense[(i, j)]))
                    .collect()
            })
            .collect();
        CsrMatrix::from_rows(dense.ncols(), rows)
    }

    fn prune_zeros(&mut self) {
        if self.data.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut indptr = Vec::with_capacity(self.rows + 1);
        indptr.push(0);
        let (mut indices, mut data) = (Vec::new(), Vec::new());
        for r in 0..self.rows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.data[k] != 0.0 {
                    indices.push(self.indices[k]);
                    data.push(self.data[k]);
                }
            }
            indptr.push(indices.len());
        }
        self.indptr = indptr;
        self.indices = indices;
        self.data = data;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.data[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        idx.binary_search(&(c as u32)).map_or(0.0, |k| val[k])
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).1.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for (&c, &v) in self.indices.iter().zip(&self.data) {
            sums[c as usize] += v;
        }
        sums
    }

    pub fn row_norm(&self, r: usize) -> f64 {
        self.row(r).1.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Applies `f(row, col, value)` to every stored entry; zero results are dropped.
    pub fn map_entries(&self, f: impl Fn(usize, usize, f64) -> f64) -> CsrMatrix {
        let mut out = self.clone();
        for r in 0..self.rows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                out.data[k] = f(r, self.indices[k] as usize, self.data[k]);
            }
        }
        out.prune_zeros();
        out
    }

    /// Keeps the listed columns, renumbered in the given order. `None`
    /// entries of `mapping` (indexed by old column) are dropped.
    pub fn remap_columns(&self, mapping: &[Option<u32>], new_cols: usize) -> CsrMatrix {
        let rows = (0..self.rows)
            .map(|r| {
                let (idx, val) = self.row(r);
                idx.iter()
                    .zip(val)
                    .filter_map(|(&c, &v)| mapping[c as usize].map(|nc| (nc, v)))
                    .collect()
            })
            .collect();
        CsrMatrix::from_rows(new_cols, rows)
    }

    /// Sparse dot product of row `r` with row `s` of another matrix over the same columns.
    pub fn row_dot(&self, r: usize, other: &CsrMatrix, s: usize) -> f64 {
        let (ai, av) = self.row(r);
        let (bi, bv) = other.row(s);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < ai.len() && j < bi.len() {
            match ai[i].cmp(&bi[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += av[i] * bv[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// `self · x` for a dense vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let (idx, val) = self.row(r);
                idx.iter().zip(val).map(|(&c, &v)| v * x[c as usize]).sum()
            })
            .collect()
    }

    /// `self · X` for a dense matrix.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.cols);
        let k = x.ncols();
        // nalgebra is column-major: work on the transposed layout row by row
        let xt = x.transpose();
        let mut out = DMatrix::zeros(k, self.rows);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let mut acc = out.column_mut(r);
            for (&c, &v) in idx.iter().zip(val) {
                acc.axpy(v, &xt.column(c as usize), 1.0);
            }
        }
        out.transpose()
    }

    /// `selfᵀ · X` for a dense matrix.
    pub fn tr_mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.rows);
        let k = x.ncols();
        let xt = x.transpose();
        let mut out = DMatrix::zeros(k, self.cols);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let xr = xt.column(r);
            for (&c, &v) in idx.iter().zip(val) {
                out.column_mut(c as usize).axpy(v, &xr, 1.0);
            }
        }
        out.transpose()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                d[(r, c as usize)] = v;
            }
        }
        d
    }
}
