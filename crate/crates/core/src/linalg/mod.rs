//! Sparse and dense linear algebra used by the Hodge machinery.

mod lanczos;
mod skyline;
mod sparse;

pub use lanczos::{lanczos_largest, LanczosOperator, LanczosOptions};
pub use skyline::{rcm_ordering, Skyline};
pub use sparse::{axpy, dot, norm2, CsrMatrix};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite matrix. Returns the solution and the final relative residual.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = b.len();
    let diag: Vec<f64> = a.diagonal().iter().map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return (x, 0.0);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let ap = a.mul_vec(&p);
        let alpha = rz / dot(&p, &ap);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        if norm2(&r) <= tol * bnorm {
            break;
        }
        z = r.iter().zip(&diag).map(|(r, d)| r * d).collect();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let res = norm2(&vec_sub(b, &a.mul_vec(&x))) / bnorm;
    (x, res)
}

pub fn vec_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Dense generalized symmetric eigenproblem `K x = λ M x` with `M` positive
/// definite. Eigenvalues ascend; eigenvectors are `M`-orthonormal columns.
pub fn generalized_eigh(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularMass("Cholesky factorization failed".into()))?;
    let l = chol.l();
    // C = L⁻¹ K L⁻ᵀ
    let linv_k = l
        .solve_lower_triangular(k)
        .ok_or_else(|| Error::SingularMass("triangular solve failed".into()))?;
    let c = l
        .solve_lower_triangular(&linv_k.transpose())
        .ok_or_else(|| Error::SingularMass("triangular solve failed".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    let x = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::SingularMass("triangular solve failed".into()))?;
    Ok((vals, x))
}

/// Orthonormal basis (columns) of the range of `a`, with singular values
/// below `rel_tol · σ_max` treated as zero.
pub fn range_basis(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax && smax > 0.0)
        .collect();
    DMatrix::from_fn(a.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Numerical rank with the relative singular value threshold.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    range_basis(a, rel_tol).ncols()
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn least_squares(a: &DMatrix<f64>, b: &[f64], rel_tol: f64) -> Vec<f64> {
    if a.ncols() == 0 {
        return Vec::new();
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = (rel_tol * smax).max(f64::MIN_POSITIVE);
    let x = svd
        .solve(&DVector::from_column_slice(b), eps)
        .expect("SVD has both factors");
    x.iter().copied().collect()
}
