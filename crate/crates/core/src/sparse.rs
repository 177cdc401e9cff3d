//! Sparse matrices: triplet assembly and compressed-column storage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate-format matrix. Duplicate entries are summed on compression.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Triplets {
    pub nrows: usize,
    pub ncols: usize,
    #[serde(rename = "i")]
    pub rows: Vec<usize>,
    #[serde(rename = "j")]
    pub cols: Vec<usize>,
    #[serde(rename = "v")]
    pub vals: Vec<f64>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Triplets { nrows, ncols, ..Default::default() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols, "({i}, {j}) out of {}x{}", self.nrows, self.ncols);
        self.rows.push(i);
        self.cols.push(j);
        self.vals.push(v);
    }

    /// Append a row given as (column, value) pairs; returns its index.
    pub fn push_row(&mut self, entries: &[(usize, f64)]) -> usize {
        let r = self.nrows;
        self.nrows += 1;
        for &(j, v) in entries {
            self.push(r, j, v);
        }
        r
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.vals.len() || self.cols.len() != self.vals.len() {
            return Err(Error::input("triplet arrays have different lengths"));
        }
        if let Some(k) = (0..self.nnz()).find(|&k| self.rows[k] >= self.nrows || self.cols[k] >= self.ncols) {
            return Err(Error::input(format!(
                "entry ({}, {}) outside {}x{}",
                self.rows[k], self.cols[k], self.nrows, self.ncols
            )));
        }
        if self.vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite matrix entry"));
        }
        Ok(())
    }

    /// y = A·x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for k in 0..self.nnz() {
            y[self.rows[k]] += self.vals[k] * x[self.cols[k]];
        }
        y
    }

    /// y = Aᵀ·x
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols];
        for k in 0..self.nnz() {
            y[self.cols[k]] += self.vals[k] * x[self.rows[k]];
        }
        y
    }

    pub fn to_csc(&self) -> CscMatrix {
        CscMatrix::from_triplets(self)
    }

    /// Largest |entry| after summing duplicates.
    pub fn max_abs(&self) -> f64 {
        self.to_csc().vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Compressed sparse column matrix with sorted, unique row indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub colptr: Vec<usize>,
    pub rowind: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CscMatrix {
    pub fn from_triplets(t: &Triplets) -> Self {
        let mut order: Vec<usize> = (0..t.nnz()).collect();
        order.sort_unstable_by_key(|&k| (t.cols[k], t.rows[k]));
        let mut colptr = vec![0; t.ncols + 1];
        let mut rowind = Vec::with_capacity(t.nnz());
        let mut vals: Vec<f64> = Vec::with_capacity(t.nnz());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let key = (t.cols[k], t.rows[k]);
            if last == Some(key) {
                *vals.last_mut().unwrap() += t.vals[k];
            } else {
                rowind.push(key.1);
                vals.push(t.vals[k]);
                colptr[key.0 + 1] += 1;
                last = Some(key);
            }
        }
        for j in 0..t.ncols {
            colptr[j + 1] += colptr[j];
        }
        CscMatrix { nrows: t.nrows, ncols: t.ncols, colptr, rowind, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.colptr[j]..self.colptr[j + 1];
        self.rowind[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.colptr[j]..self.colptr[j + 1];
        match self.rowind[r.clone()].binary_search(&i) {
            Ok(p) => self.vals[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                y[i] += v * x[j];
            }
        }
        y
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows == self.ncols
            && (0..self.ncols).all(|j| self.col(j).all(|(i, v)| (self.get(j, i) - v).abs() <= tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compression_sums_duplicates() {
        let mut t = Triplets::new(2, 3);
        t.push(1, 2, 1.0);
        t.push(0, 0, 2.0);
        t.push(1, 2, 0.5);
        t.push(0, 2, -1.0);
        let c = t.to_csc();
        assert_eq!(c.colptr, vec![0, 1, 1, 3]);
        assert_eq!(c.rowind, vec![0, 0, 1]);
        assert_eq!(c.vals, vec![2.0, -1.0, 1.5]);
        assert_eq!(c.get(1, 2), 1.5);
        assert_eq!(c.get(1, 1), 0.0);
        let x = [1.0, 2.0, 3.0];
        assert_eq!(c.matvec(&x), t.matvec(&x));
        assert_eq!(t.matvec_t(&[1.0, 1.0]), vec![2.0, 0.0, 0.5]);
    }

    #[test]
    fn push_row_grows() {
        let mut t = Triplets::new(0, 3);
        assert_eq!(t.push_row(&[(0, 1.0), (2, 2.0)]), 0);
        assert_eq!(t.push_row(&[(1, 1.0)]), 1);
        assert_eq!(t.nrows, 2);
        assert_eq!(t.matvec(&[1.0, 1.0, 1.0]), vec![3.0, 1.0]);
    }

    #[test]
    fn validate_catches_out_of_range() {
        let t = Triplets { nrows: 1, ncols: 1, rows: vec![1], cols: vec![0], vals: vec![1.0] };
        assert!(t.validate().is_err());
    }
}
