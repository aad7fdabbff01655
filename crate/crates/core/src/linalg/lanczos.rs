use nalgebra::{DMatrix, SymmetricEigen};

use super::sparse::{axpy, dot};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Number of wanted (non-skipped) eigenpairs.
    pub nev: usize,
    /// Relative Ritz residual tolerance.
    pub tol: f64,
    pub max_dim: usize,
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { nev: 1, tol: 1e-11, max_dim: 300, max_restarts: 20 }
    }
}

/// Operator interface for [`lanczos_largest`]: `A` must be self-adjoint in the
/// inner product given by `M`.
pub trait LanczosOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[f64]) -> Vec<f64>;
    fn apply_m(&self, v: &[f64]) -> Vec<f64>;
    /// Removes components the iteration must never see; identity by default.
    fn project(&self, _v: &mut [f64]) {}
    /// Ritz values for which this returns true are not counted as wanted.
    fn skip(&self, _theta: f64) -> bool {
        false
    }
}

/// Largest eigenpairs of an `M`-self-adjoint operator by Lanczos with full
/// reorthogonalization and explicit restarts.
///
/// Returns `(θ, x)` pairs, `θ` descending, `x` `M`-normalized.
pub fn lanczos_largest(
    op: &dyn LanczosOperator,
    start: Vec<f64>,
    opts: &LanczosOptions,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = op.dim();
    let max_dim = opts.max_dim.min(n).max(1);
    let mut start = start;
    for _restart in 0..=opts.max_restarts {
        let mut q: Vec<Vec<f64>> = Vec::new();
        let mut mq: Vec<Vec<f64>> = Vec::new();
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();

        let mut v = start.clone();
        op.project(&mut v);
        let mv = op.apply_m(&v);
        let nrm = dot(&v, &mv).sqrt();
        if !(nrm > 0.0) {
            return Err(Error::Numerical("Lanczos start vector vanishes after projection".into()));
        }
        q.push(v.iter().map(|x| x / nrm).collect());
        mq.push(mv.iter().map(|x| x / nrm).collect());

        let mut result: Option<Vec<(f64, Vec<f64>)>> = None;
        let best: Vec<(f64, Vec<f64>)>;
        loop {
            let j = q.len() - 1;
            let mut w = op.apply(&q[j]);
            op.project(&mut w);
            let a = dot(&mq[j], &w);
            axpy(-a, &q[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &q[j - 1], &mut w);
            }
            for _ in 0..2 {
                for i in 0..q.len() {
                    let c = dot(&mq[i], &w);
                    axpy(-c, &q[i], &mut w);
                }
            }
            alpha.push(a);
            let mw = op.apply_m(&w);
            let b = dot(&w, &mw).max(0.0).sqrt();
            let m = alpha.len();
            let exhausted = b <= 1e-14 * a.abs().max(1e-300) || m >= max_dim;
            if m % 10 == 0 || exhausted || m == n {
                let (ritz, conv) = ritz_pairs(&alpha, &beta, b, &q, op, opts);
                if conv || b <= 1e-14 * a.abs().max(1e-300) || m == n {
                    result = Some(ritz);
                    best = Vec::new();
                    break;
                }
                if m >= max_dim {
                    best = ritz;
                    break;
                }
            }
            beta.push(b);
            q.push(w.iter().map(|x| x / b).collect());
            mq.push(mw.iter().map(|x| x / b).collect());
        }
        if let Some(r) = result {
            return Ok(r);
        }
        // restart from the combination of the wanted Ritz vectors
        start = vec![0.0; n];
        for (_, x) in &best {
            axpy(1.0, x, &mut start);
        }
    }
    Err(Error::Numerical(format!(
        "Lanczos did not converge after {} restarts",
        opts.max_restarts
    )))
}

/// Ritz pairs of the current tridiagonal, wanted ones first in descending
/// order; the flag reports convergence of the first `nev` wanted ones.
fn ritz_pairs(
    alpha: &[f64],
    beta: &[f64],
    b_last: f64,
    q: &[Vec<f64>],
    op: &dyn LanczosOperator,
    opts: &LanczosOptions,
) -> (Vec<(f64, Vec<f64>)>, bool) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut out = Vec::new();
    let mut converged = true;
    for &i in &order {
        let theta = eig.eigenvalues[i];
        if op.skip(theta) {
            continue;
        }
        let resid = (b_last * eig.eigenvectors[(m - 1, i)]).abs();
        if resid > opts.tol * theta.abs() {
            converged = false;
        }
        let mut x = vec![0.0; q[0].len()];
        for (k, qk) in q.iter().enumerate().take(m) {
            axpy(eig.eigenvectors[(k, i)], qk, &mut x);
        }
        out.push((theta, x));
        if out.len() == opts.nev {
            break;
        }
    }
    if out.len() < opts.nev {
        converged = false;
    }
    (out, converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag(Vec<f64>);

    impl LanczosOperator for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, v: &[f64]) -> Vec<f64> {
            v.iter().zip(&self.0).map(|(a, b)| a * b).collect()
        }
        fn apply_m(&self, v: &[f64]) -> Vec<f64> {
            v.to_vec()
        }
        fn skip(&self, theta: f64) -> bool {
            theta > 99.0
        }
    }

    #[test]
    fn finds_largest_wanted() {
        let mut d: Vec<f64> = (1..=200).map(|i| 1.0 / i as f64).collect();
        d[7] = 100.0;
        let op = Diag(d);
        let start = vec![1.0; 200];
        let opts = LanczosOptions { nev: 3, ..Default::default() };
        let r = lanczos_largest(&op, start, &opts).unwrap();
        let thetas: Vec<f64> = r.iter().map(|p| p.0).collect();
        assert!((thetas[0] - 1.0).abs() < 1e-10);
        assert!((thetas[1] - 0.5).abs() < 1e-10);
        assert!((thetas[2] - 1.0 / 3.0).abs() < 1e-10);
    }
}
