use nalgebra::DMatrix;

use crate::complex::IncidenceMatrix;

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries in input order, so assembly is reproducible.
    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by_key(|e| (e.0, e.1));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    pub fn from_incidence(d: &IncidenceMatrix) -> Self {
        let mut t = Vec::with_capacity(d.nnz());
        for (j, col) in d.columns().iter().enumerate() {
            for &(i, v) in col {
                t.push((i, j, v as f64));
            }
        }
        Self::from_triplets(d.nrows(), d.ncols(), t)
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        idx.binary_search(&j).map(|p| val[p]).unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (idx, val) = self.row(i);
                idx.iter().zip(val).map(|(&j, v)| v * x[j]).sum()
            })
            .collect()
    }

    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            for (&j, v) in idx.iter().zip(val) {
                y[j] += v * x[i];
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                t.push((j, i, v));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, t)
    }

    pub fn matmul(&self, b: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, b.nrows);
        let mut t = Vec::new();
        let mut acc = vec![0.0; b.ncols];
        let mut mark = vec![usize::MAX; b.ncols];
        let mut touched = Vec::new();
        for i in 0..self.nrows {
            touched.clear();
            let (ia, va) = self.row(i);
            for (&k, &a) in ia.iter().zip(va) {
                let (ib, vb) = b.row(k);
                for (&j, &bv) in ib.iter().zip(vb) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a * bv;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                t.push((i, j, acc[j]));
            }
        }
        Self::from_triplets(self.nrows, b.ncols, t)
    }

    /// `self + alpha · b`.
    pub fn add_scaled(&self, b: &CsrMatrix, alpha: f64) -> Self {
        assert_eq!((self.nrows, self.ncols), (b.nrows, b.ncols));
        let mut t = Vec::with_capacity(self.nnz() + b.nnz());
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            t.extend(idx.iter().zip(val).map(|(&j, &v)| (i, j, v)));
            let (idx, val) = b.row(i);
            t.extend(idx.iter().zip(val).map(|(&j, &v)| (i, j, alpha * v)));
        }
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Largest `|a_ij − a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    /// Rows and columns restricted to `keep` (in that order).
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.ncols];
        for (p, &k) in keep.iter().enumerate() {
            pos[k] = p;
        }
        let mut t = Vec::new();
        for (p, &i) in keep.iter().enumerate() {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                if pos[j] != usize::MAX {
                    t.push((p, pos[j], v));
                }
            }
        }
        Self::from_triplets(keep.len(), keep.len(), t)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
