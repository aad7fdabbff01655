use nalgebra::{DMatrix, DVector};

use super::{WhitneyStructure, RANK_TOL};
use crate::complex::Cochain;
use crate::error::{Error, Result};
use crate::linalg::{
    conjugate_gradient, generalized_eigh, lanczos_largest, range_basis, CsrMatrix, LanczosOperator,
    LanczosOptions, Skyline,
};

/// Harmonic, exact and coexact components of a cochain.
#[derive(Clone, Debug)]
pub struct HodgeParts {
    pub degree: usize,
    pub harmonic: Vec<f64>,
    pub exact: Vec<f64>,
    pub coexact: Vec<f64>,
    /// Dimensions of the harmonic, exact and coexact subspaces.
    pub dims: [usize; 3],
}

/// `M`-orthogonal projection onto `im d_{k−1}`.
pub(crate) struct ExactProjector<'a> {
    w: &'a WhitneyStructure,
    deg: usize,
    laplace: CsrMatrix,
    grounded: Option<(Vec<usize>, Skyline)>,
}

impl<'a> ExactProjector<'a> {
    pub fn new(w: &'a WhitneyStructure, deg: usize) -> Result<Self> {
        let d = w.coboundary(deg - 1)?;
        let laplace = d.transpose().matmul(&w.mass(deg)?.matmul(d));
        let grounded = if deg == 1 {
            // constants per component span the kernel; pin one vertex of each
            let comp = w.components();
            let mut seen = std::collections::BTreeSet::new();
            let keep: Vec<usize> = (0..comp.len()).filter(|&v| !seen.insert(comp[v])).collect();
            let f = Skyline::factor(&laplace.submatrix(&keep))
                .map_err(|e| Error::Numerical(format!("grounded vertex Laplacian: {e}")))?;
            Some((keep, f))
        } else {
            None
        };
        Ok(Self { w, deg, laplace, grounded })
    }

    /// Potential `u` with `d u` the exact part of `f`.
    pub fn potential(&self, f: &[f64]) -> Result<Vec<f64>> {
        let d = self.w.coboundary(self.deg - 1)?;
        let rhs = d.tr_mul_vec(&self.w.mass(self.deg)?.mul_vec(f));
        match &self.grounded {
            Some((keep, fac)) => {
                let r: Vec<f64> = keep.iter().map(|&i| rhs[i]).collect();
                let x = fac.solve(&r);
                let mut u = vec![0.0; rhs.len()];
                for (&i, v) in keep.iter().zip(x) {
                    u[i] = v;
                }
                Ok(u)
            }
            None => {
                let (u, res) = conjugate_gradient(&self.laplace, &rhs, 1e-14, 20 * rhs.len() + 100);
                if res > 1e-9 {
                    return Err(Error::Numerical(format!("exact projection residual {res:e}")));
                }
                Ok(u)
            }
        }
    }

    pub fn exact_part(&self, f: &[f64]) -> Result<Vec<f64>> {
        let u = self.potential(f)?;
        self.w.apply_d(self.deg - 1, &u)
    }
}

/// Shift-inverted operator `(A + sM)⁻¹ M` for the kernel of
/// `A = dᵀ M d + M d dᵀ M`, whose null vectors are the harmonic cochains.
struct HarmonicOp<'a> {
    m: &'a CsrMatrix,
    fac: Skyline,
}

impl LanczosOperator for HarmonicOp<'_> {
    fn dim(&self) -> usize {
        self.m.nrows()
    }
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.fac.solve(&self.m.mul_vec(v))
    }
    fn apply_m(&self, v: &[f64]) -> Vec<f64> {
        self.m.mul_vec(v)
    }
}

impl WhitneyStructure {
    fn check_cochain(&self, deg: usize, f: &[f64]) -> Result<()> {
        if deg > self.dim() {
            return Err(Error::DegreeOutOfRange { degree: deg, dim: self.dim() });
        }
        if f.len() != self.count(deg) {
            return Err(Error::DegreeMismatch { expected: self.count(deg), got: f.len() });
        }
        Ok(())
    }

    /// `d*_W g = M_{k−1}⁻¹ d_{k−1}ᵀ M_k g` for `g ∈ C^k`.
    pub fn codifferential(&self, deg: usize, g: &[f64]) -> Result<Vec<f64>> {
        self.check_cochain(deg, g)?;
        if deg == 0 {
            return Err(Error::DegreeOutOfRange { degree: 0, dim: self.dim() });
        }
        let v = self.coboundary(deg - 1)?.tr_mul_vec(&self.mass(deg)?.mul_vec(g));
        self.mass_solve(deg - 1, &v)
    }

    /// `Δ_W f = d d*_W f + d*_W d f`.
    pub fn laplacian(&self, deg: usize, f: &[f64]) -> Result<Vec<f64>> {
        self.check_cochain(deg, f)?;
        let mut out = vec![0.0; f.len()];
        if deg > 0 {
            let a = self.apply_d(deg - 1, &self.codifferential(deg, f)?)?;
            out.iter_mut().zip(a).for_each(|(o, x)| *o += x);
        }
        if deg < self.dim() {
            let b = self.codifferential(deg + 1, &self.apply_d(deg, f)?)?;
            out.iter_mut().zip(b).for_each(|(o, x)| *o += x);
        }
        Ok(out)
    }

    /// `M`-weighted Laplacian matrix `S` with `Δ_W = M⁻¹ S`, dense.
    fn laplacian_dense(&self, deg: usize) -> Result<DMatrix<f64>> {
        let m = self.mass(deg)?.to_dense();
        let mut s = DMatrix::zeros(m.nrows(), m.ncols());
        if deg < self.dim() {
            let d = self.coboundary(deg)?.to_dense();
            s += d.transpose() * self.mass(deg + 1)?.to_dense() * &d;
        }
        if deg > 0 {
            let d = self.coboundary(deg - 1)?.to_dense();
            let md = &m * &d;
            let minv = self
                .mass(deg - 1)?
                .to_dense()
                .cholesky()
                .ok_or_else(|| Error::SingularMass(format!("degree {}", deg - 1)))?;
            s += &md * minv.solve(&md.transpose());
        }
        Ok(s)
    }

    /// Dimension of `ker Δ_W` in degree `deg` from a dense generalized
    /// eigensolve, eigenvalues below `RANK_TOL · λ_max` counted as zero.
    pub fn laplacian_kernel_dim(&self, deg: usize) -> Result<usize> {
        let s = self.laplacian_dense(deg)?;
        let (vals, _) = generalized_eigh(&s, &self.mass(deg)?.to_dense())?;
        let max = vals.iter().copied().fold(0.0, f64::max);
        Ok(vals.iter().filter(|&&v| v <= RANK_TOL * max).count())
    }

    /// Mass Cholesky factor and orthonormal bases of the exact and coexact
    /// subspaces in the coordinates `y = Lᵀ f`.
    fn dense_bases(&self, deg: usize) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        let n = self.count(deg);
        let l = self
            .mass(deg)?
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::SingularMass(format!("degree {deg}")))?
            .l();
        let qe = if deg > 0 {
            let d = self.coboundary(deg - 1)?.to_dense();
            range_basis(&(l.transpose() * d), RANK_TOL)
        } else {
            DMatrix::zeros(n, 0)
        };
        let qc = if deg < self.dim() {
            let d = self.coboundary(deg)?.to_dense();
            let b = d.transpose() * self.mass(deg + 1)?.to_dense();
            let b = l
                .solve_lower_triangular(&b)
                .ok_or_else(|| Error::SingularMass(format!("degree {deg}")))?;
            range_basis(&b, RANK_TOL)
        } else {
            DMatrix::zeros(n, 0)
        };
        Ok((l, qe, qc))
    }

    fn use_dense(&self, deg: usize) -> bool {
        self.count(deg) <= self.options().dense_limit
    }

    /// Dimensions of the harmonic, exact and coexact subspaces of `C^deg`.
    /// Dense numerical ranks at desk scale; above the dense limit the exact
    /// and coexact dimensions come from integer boundary ranks and the
    /// harmonic one from an iterative kernel count.
    pub fn hodge_dims(&self, deg: usize) -> Result<[usize; 3]> {
        self.check_cochain(deg, &vec![0.0; self.count(deg)])?;
        if self.use_dense(deg) {
            let (_, qe, qc) = self.dense_bases(deg)?;
            let n = self.count(deg);
            Ok([n - qe.ncols() - qc.ncols(), qe.ncols(), qc.ncols()])
        } else {
            let r = self.ranks();
            Ok([self.harmonic_basis(deg)?.len(), r[deg], r[deg + 1]])
        }
    }

    /// `M`-orthonormal basis of the harmonic cochains of degree `deg`.
    pub fn harmonic_basis(&self, deg: usize) -> Result<Vec<Vec<f64>>> {
        self.check_cochain(deg, &vec![0.0; self.count(deg)])?;
        let n = self.count(deg);
        if self.use_dense(deg) {
            let (l, qe, qc) = self.dense_bases(deg)?;
            let mut p = DMatrix::<f64>::identity(n, n);
            p -= &qe * qe.transpose();
            p -= &qc * qc.transpose();
            let qh = range_basis(&p, 0.5);
            let x = l
                .transpose()
                .solve_upper_triangular(&qh)
                .ok_or_else(|| Error::SingularMass(format!("degree {deg}")))?;
            return Ok(x.column_iter().map(|c| c.iter().copied().collect()).collect());
        }
        let m = self.mass(deg)?;
        let mut a = CsrMatrix::from_triplets(n, n, Vec::new());
        if deg < self.dim() {
            let d = self.coboundary(deg)?;
            a = a.add_scaled(&d.transpose().matmul(&self.mass(deg + 1)?.matmul(d)), 1.0);
        }
        if deg > 0 {
            let md = m.matmul(self.coboundary(deg - 1)?);
            a = a.add_scaled(&md.matmul(&md.transpose()), 1.0);
        }
        let tr_m: f64 = m.diagonal().iter().sum();
        let tr_a: f64 = a.diagonal().iter().sum();
        let s = (tr_a / (tr_m * n as f64)).max(f64::MIN_POSITIVE);
        let fac = Skyline::factor(&a.add_scaled(m, s))
            .map_err(|e| Error::Numerical(format!("shifted Hodge operator: {e}")))?;
        let op = HarmonicOp { m, fac };
        let expected = self.betti()[deg];
        let opts = LanczosOptions { nev: expected + 1, ..Default::default() };
        let start = super::spectrum::start_vector(n);
        let pairs = lanczos_largest(&op, start, &opts)?;
        Ok(pairs
            .into_iter()
            .filter(|(theta, _)| (theta * s - 1.0).abs() < 1e-6)
            .map(|p| p.1)
            .collect())
    }

    /// `M`-orthogonal Hodge decomposition of `f`.
    pub fn hodge_decompose(&self, f: &Cochain) -> Result<HodgeParts> {
        let deg = f.degree;
        self.check_cochain(deg, &f.coeffs)?;
        let n = self.count(deg);
        if self.use_dense(deg) {
            let (l, qe, qc) = self.dense_bases(deg)?;
            let y = l.transpose() * DVector::from_column_slice(&f.coeffs);
            let ye = &qe * (qe.transpose() * &y);
            let yc = &qc * (qc.transpose() * &y);
            let back = |v: DVector<f64>| -> Result<Vec<f64>> {
                Ok(l.transpose()
                    .solve_upper_triangular(&v)
                    .ok_or_else(|| Error::SingularMass(format!("degree {deg}")))?
                    .iter()
                    .copied()
                    .collect())
            };
            let exact = back(ye)?;
            let coexact = back(yc)?;
            let harmonic: Vec<f64> = (0..n).map(|i| f.coeffs[i] - exact[i] - coexact[i]).collect();
            return Ok(HodgeParts {
                degree: deg,
                harmonic,
                exact,
                coexact,
                dims: [n - qe.ncols() - qc.ncols(), qe.ncols(), qc.ncols()],
            });
        }
        let exact = if deg > 0 { ExactProjector::new(self, deg)?.exact_part(&f.coeffs)? } else { vec![0.0; n] };
        let basis = self.harmonic_basis(deg)?;
        let mf = self.mass(deg)?.mul_vec(&f.coeffs);
        let mut harmonic = vec![0.0; n];
        for h in &basis {
            let c: f64 = h.iter().zip(&mf).map(|(a, b)| a * b).sum();
            crate::linalg::axpy(c, h, &mut harmonic);
        }
        let coexact: Vec<f64> = (0..n).map(|i| f.coeffs[i] - exact[i] - harmonic[i]).collect();
        let r = self.ranks();
        Ok(HodgeParts { degree: deg, harmonic, exact, coexact, dims: [basis.len(), r[deg], r[deg + 1]] })
    }

    /// Relative size of the exact and harmonic parts of `f`:
    /// `‖f − coexact(f)‖₂ / ‖f‖₂`.
    pub fn coexact_residual(&self, f: &Cochain) -> Result<f64> {
        let parts = self.hodge_decompose(f)?;
        let rest: Vec<f64> = parts.exact.iter().zip(&parts.harmonic).map(|(a, b)| a + b).collect();
        let nf = self.inner(f.degree, &f.coeffs, &f.coeffs)?.sqrt();
        if nf == 0.0 {
            return Ok(0.0);
        }
        Ok(self.inner(f.degree, &rest, &rest)?.max(0.0).sqrt() / nf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::torus_mesh;
    use crate::whitney::WhitneyOptions;

    #[test]
    fn torus_hodge_dimensions() {
        let t = torus_mesh(4, 2, 0.25).unwrap();
        let w = WhitneyStructure::assemble(&t.complex, &t.metric, WhitneyOptions::default()).unwrap();
        let (v, e) = (t.complex.count(0), t.complex.count(1));
        assert_eq!(w.hodge_dims(1).unwrap(), [2, v - 1, e - v - 1]);
        assert_eq!(w.laplacian_kernel_dim(1).unwrap(), 2);
        let sparse = WhitneyStructure::assemble(
            &t.complex,
            &t.metric,
            WhitneyOptions { dense_limit: 0, ..Default::default() },
        )
        .unwrap();
        assert_eq!(sparse.hodge_dims(1).unwrap(), [2, v - 1, e - v - 1]);
        let f = Cochain::new(1, (0..e).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect());
        let a = w.hodge_decompose(&f).unwrap();
        let b = sparse.hodge_decompose(&f).unwrap();
        for (x, y) in a.coexact.iter().zip(&b.coexact) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}
