//! Signed integer incidence matrices stored column by column.

use nalgebra::DMatrix;

/// A sparse integer matrix stored by columns, each column sorted by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    nrows: usize,
    ncols: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl IncidenceMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    /// Builds a matrix from unsorted column entries, merging duplicates and
    /// dropping zeros.
    pub fn from_columns(nrows: usize, cols: Vec<Vec<(usize, i64)>>) -> Self {
        let ncols = cols.len();
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, i64)> = Vec::with_capacity(c.len());
                for (r, v) in c {
                    debug_assert!(r < nrows);
                    match merged.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => merged.push((r, v)),
                    }
                }
                merged.retain(|e| e.1 != 0);
                merged
            })
            .collect();
        Self { nrows, ncols, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, i64)>] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.cols[j]
            .binary_search_by_key(&i, |e| e.0)
            .map(|p| self.cols[j][p].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut cols = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                cols[i].push((j, v));
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            cols,
        }
    }

    /// Exact product `self * rhs`.
    pub fn matmul(&self, rhs: &IncidenceMatrix) -> IncidenceMatrix {
        assert_eq!(self.ncols, rhs.nrows, "dimension mismatch in matmul");
        let cols = rhs
            .cols
            .iter()
            .map(|c| {
                let mut acc: Vec<(usize, i64)> = Vec::new();
                for &(k, v) in c {
                    for &(i, w) in &self.cols[k] {
                        acc.push((i, v * w));
                    }
                }
                acc
            })
            .collect();
        IncidenceMatrix::from_columns(self.nrows, cols)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn mul_vec_i64(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0i64; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            if x[j] == 0 {
                continue;
            }
            for &(i, v) in c {
                y[i] += v * x[j];
            }
        }
        y
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for &(i, v) in c {
                y[i] += v as f64 * xj;
            }
        }
        y
    }

    /// `selfᵀ x` without forming the transpose.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        self.cols
            .iter()
            .map(|c| c.iter().map(|&(i, v)| v as f64 * x[i]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                m[(i, j)] = v as f64;
            }
        }
        m
    }

    /// Rank over the rationals, computed exactly.
    pub fn rank(&self) -> usize {
        crate::complex::homology::exact_rank(self)
    }
}
