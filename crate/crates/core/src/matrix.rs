//! Row-compressed sparse stochastic matrices.

use crate::error::{Error, Result};
use crate::numeric::Scalar;

/// Sparse row-stochastic matrix in CSR layout. Row `u` holds the outgoing
/// transition probabilities of state `u`.
#[derive(Clone, Debug)]
pub struct SparseStochasticMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<T>,
}

impl<T: Scalar> SparseStochasticMatrix<T> {
    /// Build from per-row `(col, value)` lists. Rows are sorted by column;
    /// duplicate columns within a row are summed.
    pub fn from_rows(dim: usize, rows: Vec<Vec<(u32, T)>>) -> Self {
        assert_eq!(rows.len(), dim, "row count must equal dimension");
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals: Vec<T> = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                debug_assert!((c as usize) < dim, "column {c} out of bounds");
                if cols.last() == Some(&c) && *row_ptr.last().unwrap() < cols.len() {
                    let last = vals.len() - 1;
                    vals[last] = vals[last].clone() + v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseStochasticMatrix { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, u: usize) -> impl Iterator<Item = (u32, &T)> {
        let lo = self.row_ptr[u];
        let hi = self.row_ptr[u + 1];
        self.cols[lo..hi].iter().copied().zip(self.vals[lo..hi].iter())
    }

    /// Entry lookup by binary search within the row; zero when absent.
    pub fn entry(&self, u: usize, v: u32) -> T {
        let lo = self.row_ptr[u];
        let hi = self.row_ptr[u + 1];
        match self.cols[lo..hi].binary_search(&v) {
            Ok(k) => self.vals[lo + k].clone(),
            Err(_) => T::zero(),
        }
    }

    /// Left multiplication `x P` for a dense row vector.
    pub fn apply_left(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let mut y = vec![T::zero(); self.dim];
        for (u, xu) in x.iter().enumerate() {
            if xu.is_zero() {
                continue;
            }
            for (c, p) in self.row(u) {
                let c = c as usize;
                y[c] = y[c].clone() + xu.clone() * p.clone();
            }
        }
        Ok(y)
    }

    /// Left multiplication restricted to the nonzero support of `x`,
    /// scattering into `out` (assumed zeroed, length `dim`).
    pub fn apply_left_sparse(&self, x: &[(u32, T)], out: &mut Vec<(u32, T)>) {
        use std::collections::BTreeMap;
        let mut acc: BTreeMap<u32, T> = BTreeMap::new();
        for (u, xu) in x {
            for (c, p) in self.row(*u as usize) {
                let slot = acc.entry(c).or_insert_with(T::zero);
                *slot = slot.clone() + xu.clone() * p.clone();
            }
        }
        out.clear();
        out.extend(acc);
    }

    pub fn row_sum(&self, u: usize) -> T {
        self.row(u).fold(T::zero(), |a, (_, v)| a + v.clone())
    }

    /// Largest `|row_sum - 1|` over all rows, as f64.
    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.dim)
            .map(|u| (self.row_sum(u) - T::one()).abs_val().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseStochasticMatrix<U> {
        SparseStochasticMatrix {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> SparseStochasticMatrix<f64> {
        self.map(|v| v.to_f64())
    }

    /// Coordinate-list text dump (`row col value` per line, value as
    /// `num/den` in rational mode), for debugging.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for u in 0..self.dim {
            for (c, v) in self.row(u) {
                out.push_str(&format!("{u} {c} {}\n", v.coo_repr()));
            }
        }
        out
    }
}
