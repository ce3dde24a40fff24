//! Row-compressed storage for real symmetric matrices.
//!
//! Both triangles are stored; column indices within a row are sorted so the
//! matrix-vector product always accumulates in the same order.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCsr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymmetricCsr {
    pub fn zeros(dim: usize) -> Self {
        SymmetricCsr { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    /// Builds a matrix from per-row `(column, value)` lists. Entries with the
    /// same column are summed; rows need not be sorted.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let start = cols.len();
            for (c, v) in row {
                debug_assert!(c < dim);
                if cols.len() > start && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SymmetricCsr { dim, row_ptr, cols, vals }
    }

    /// Dense row-major input, mainly for tests; zeros are dropped.
    pub fn from_dense(dim: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), dim * dim);
        let rows = (0..dim)
            .map(|r| (0..dim).filter(|&c| data[r * dim + c] != 0.0).map(|c| (c, data[r * dim + c])).collect())
            .collect();
        Self::from_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|&v| v == 0.0)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(i) => self.vals[range.start + i],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, r)).collect()
    }

    /// `y = scale * A x` (overwrites `y`).
    pub fn mul_into(&self, x: &[f64], scale: f64, y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = scale * acc;
        }
    }

    /// `y += scale * A x`.
    pub fn mul_add_into(&self, x: &[f64], scale: f64, y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out += scale * acc;
        }
    }

    /// Principal submatrix on the strictly increasing positions `keep`.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for &old in keep {
            for (c, v) in self.row(old) {
                let nc = map[c];
                if nc != usize::MAX {
                    cols.push(nc);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SymmetricCsr { dim: keep.len(), row_ptr, cols, vals }
    }

    /// Largest |A[r,c] - A[c,r]| over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                out[r * self.dim + c] = v;
            }
        }
        out
    }

    /// Coordinate-format dump: header `dim nnz`, then one `row col value`
    /// line per stored entry (0-based indices).
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.dim, self.nnz())?;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                writeln!(w, "{r} {c} {v:.17e}")?;
            }
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, got: len });
        }
        Ok(())
    }
}
