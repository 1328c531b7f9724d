//! Compressed sparse row matrix, just enough for collocation systems:
//! construction from per-row entry lists, matvec, and triplet export.

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct CsrMat<T> {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<T>,
}

impl<T: Real> CsrMat<T> {
    /// Build from per-row (column, value) lists; entries within a row are
    /// sorted by column, zero values kept out.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, T)>>) -> Self {
        let n_rows = rows.len();
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                debug_assert!(c < n_cols);
                if v != T::zero() {
                    col_idx.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.vals[lo..hi])
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    /// Diagonal entries (zero where absent).
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .find(|&(&c, _)| c == i)
                    .map(|(_, &v)| v)
                    .unwrap_or_else(T::zero)
            })
            .collect()
    }

    /// Dense copy (small systems only).
    pub fn to_dense(&self) -> crate::la::DenseMat<T> {
        let mut m = crate::la::DenseMat::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                *m.at_mut(i, c) = v;
            }
        }
        m
    }

    /// Coordinate triplet text: one "row col value" line per nonzero.
    pub fn to_triplets(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out.push_str(&format!("{i} {c} {v:.17e}\n"));
            }
        }
        out
    }
}
