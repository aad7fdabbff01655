use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hodge::ExactProjector;
use super::{WhitneyStructure, RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    dot, generalized_eigh, lanczos_largest, norm2, CsrMatrix, LanczosOperator, LanczosOptions, Skyline,
};

/// Default number of unknowns above which eigenproblems go iterative.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverPath {
    Dense,
    Lanczos,
}

impl std::fmt::Display for SolverPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverPath::Dense => "dense",
            SolverPath::Lanczos => "lanczos",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    /// Rayleigh quotient `‖df‖₂² / ‖f‖₂²` of the returned vector.
    pub value: f64,
    /// `M`-normalized eigencochain.
    pub vector: Vec<f64>,
    /// `‖S x − λ M x‖ / (λ ‖M x‖)`.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub degree: usize,
    pub pairs: Vec<Eigenpair>,
    pub path: SolverPath,
}

/// Deterministic start vector for the iterative solvers.
pub(crate) fn start_vector(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2c);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

struct ShiftInvert<'a> {
    m: &'a CsrMatrix,
    fac: Skyline,
    shift: f64,
    zero_tol: f64,
    projector: Option<ExactProjector<'a>>,
}

impl LanczosOperator for ShiftInvert<'_> {
    fn dim(&self) -> usize {
        self.m.nrows()
    }
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.fac.solve(&self.m.mul_vec(v))
    }
    fn apply_m(&self, v: &[f64]) -> Vec<f64> {
        self.m.mul_vec(v)
    }
    fn project(&self, v: &mut [f64]) {
        if let Some(p) = &self.projector {
            if let Ok(e) = p.exact_part(v) {
                v.iter_mut().zip(e).for_each(|(x, y)| *x -= y);
            }
        }
    }
    fn skip(&self, theta: f64) -> bool {
        theta <= 0.0 || 1.0 / theta - self.shift <= self.zero_tol
    }
}

impl WhitneyStructure {
    /// `S_k = d_kᵀ M_{k+1} d_k`.
    pub fn stiffness(&self, deg: usize) -> Result<CsrMatrix> {
        let d = self.coboundary(deg)?;
        Ok(d.transpose().matmul(&self.mass(deg + 1)?.matmul(d)))
    }

    /// Smallest positive eigenpairs of the pencil `(d_kᵀ M_{k+1} d_k, M_k)`.
    /// Their eigenvectors are coexact; for `k = 0` this is the function
    /// Laplacian.
    pub fn coexact_spectrum(&self, deg: usize, nev: usize) -> Result<Spectrum> {
        if deg >= self.dim() {
            return Err(Error::NoPositiveEigenvalue(format!("degree {deg} has no coexact cochains")));
        }
        let s = self.stiffness(deg)?;
        let m = self.mass(deg)?;
        let n = m.nrows();
        let nev = nev.max(1);
        let (raw, path) = if n <= self.options().dense_limit {
            let (vals, vecs) = generalized_eigh(&s.to_dense(), &m.to_dense())?;
            let max = vals.iter().copied().fold(0.0, f64::max);
            if !(max > 0.0) {
                return Err(Error::NoPositiveEigenvalue("stiffness vanishes".into()));
            }
            let raw: Vec<Vec<f64>> = (0..n)
                .filter(|&i| vals[i] > RANK_TOL * max)
                .take(nev)
                .map(|i| vecs.column(i).iter().copied().collect())
                .collect();
            (raw, SolverPath::Dense)
        } else {
            let tr_s: f64 = s.diagonal().iter().sum();
            let tr_m: f64 = m.diagonal().iter().sum();
            if !(tr_s > 0.0) {
                return Err(Error::NoPositiveEigenvalue("stiffness vanishes".into()));
            }
            let shift = tr_s / (tr_m * n as f64);
            let fac = Skyline::factor(&s.add_scaled(m, shift))
                .map_err(|e| Error::Numerical(format!("shifted pencil: {e}")))?;
            let projector = if deg > 0 { Some(ExactProjector::new(self, deg)?) } else { None };
            let op = ShiftInvert { m, fac, shift, zero_tol: RANK_TOL * tr_s / tr_m, projector };
            let opts = LanczosOptions { nev, ..Default::default() };
            let pairs = lanczos_largest(&op, start_vector(n), &opts)?;
            (pairs.into_iter().map(|p| p.1).collect(), SolverPath::Lanczos)
        };
        if raw.is_empty() {
            return Err(Error::NoPositiveEigenvalue("no positive pencil eigenvalue".into()));
        }
        let pairs = raw
            .into_iter()
            .map(|mut x| {
                let mx = m.mul_vec(&x);
                let nrm = dot(&x, &mx).sqrt();
                x.iter_mut().for_each(|v| *v /= nrm);
                let mx: Vec<f64> = mx.iter().map(|v| v / nrm).collect();
                let sx = s.mul_vec(&x);
                let value = dot(&x, &sx);
                let r: Vec<f64> = sx.iter().zip(&mx).map(|(a, b)| a - value * b).collect();
                let residual = norm2(&r) / (value.abs() * norm2(&mx)).max(f64::MIN_POSITIVE);
                Eigenpair { value, vector: x, residual }
            })
            .collect();
        Ok(Spectrum { degree: deg, pairs, path })
    }

    /// Smallest positive eigenpair of `d*_W d` on coexact `k`-cochains.
    pub fn coexact_gap(&self, deg: usize) -> Result<Eigenpair> {
        Ok(self.coexact_spectrum(deg, 1)?.pairs.remove(0))
    }

    /// First positive eigenvalue of the function Laplacian.
    pub fn function_gap(&self) -> Result<Eigenpair> {
        self.coexact_gap(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Cochain;
    use crate::geometry::torus_mesh;
    use crate::whitney::WhitneyOptions;

    #[test]
    fn lanczos_path_matches_dense() {
        let t = torus_mesh(3, 2, 1.0 / 3.0).unwrap();
        assert!(t.complex.count(1) <= 60);
        let dense = WhitneyStructure::assemble(&t.complex, &t.metric, WhitneyOptions::default()).unwrap();
        let iter = WhitneyStructure::assemble(
            &t.complex,
            &t.metric,
            WhitneyOptions { dense_limit: 0, ..Default::default() },
        )
        .unwrap();
        let a = dense.coexact_spectrum(1, 4).unwrap();
        let b = iter.coexact_spectrum(1, 4).unwrap();
        assert_eq!(b.path, SolverPath::Lanczos);
        for (x, y) in a.pairs.iter().zip(&b.pairs) {
            assert!((x.value - y.value).abs() < 1e-9 * x.value, "{} {}", x.value, y.value);
        }
        let f = Cochain::new(1, b.pairs[0].vector.clone());
        assert!(iter.coexact_residual(&f).unwrap() < 1e-8);
    }
}
