use nalgebra::{DMatrix, DVector, SVD};
use rayon::prelude::*;

use super::fill::{fill_norm_dual, CellWeights, LpMode};
use super::geodesic::CellularPath;
use crate::complex::dual::DualComplex;
use crate::complex::{star_bound, Chain, Cochain, OrientedComplex};
use crate::error::{Error, Result};
use crate::norms::{gromov_norm, sample_vector, whitney_l2};
use crate::whitney::{WhitneyStructure, RANK_TOL};

/// Relative slack allowed when an inequality is compared in floating point.
pub const STEP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Clone, Debug)]
pub struct ChainStep {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub holds: bool,
}

impl ChainStep {
    fn new(name: &'static str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        let holds = match relation {
            Relation::Le => lhs <= rhs + STEP_TOL * scale,
            Relation::Eq => (lhs - rhs).abs() <= STEP_TOL * scale,
        } && lhs.is_finite()
            && rhs.is_finite();
        ChainStep { name, lhs, rhs, relation, holds }
    }
}

/// Measured constants entering the chain.
#[derive(Clone, Debug)]
pub struct MeasuredConstants {
    /// `max ‖f‖_G / (√vol ‖f‖₂)` over sampled 1-cochains (including basis
    /// elements and the cochain `ω` of the run).
    pub b_hat: f64,
    /// `max ‖g‖₂ / ‖g‖_G` over 2-cochains, attained on a basis element.
    pub d_hat: f64,
    /// Star bound of the complex.
    pub n_star: usize,
    /// `len(c) / |γ|`.
    pub l_hat: f64,
    pub lambda_w: f64,
    pub volume: f64,
}

#[derive(Clone, Debug)]
pub struct TheoremAReport {
    pub steps: Vec<ChainStep>,
    pub constants: MeasuredConstants,
    pub gamma_length: f64,
    pub word_length: usize,
    pub fill: f64,
    pub scl_upper: f64,
    /// The 2-chain of `K*` with boundary the cycle.
    pub filling_chain: Chain,
    pub omega: Cochain,
    /// Smallest constant making `√λ_W ≤ Â·vol·|γ|/scl` true for this cycle.
    pub a_hat: f64,
    /// `4 N B̂ D̂ L̂ / √vol`, the constant the chain of inequalities provides.
    pub bound_constant: f64,
    /// `bound_constant / a_hat`.
    pub slack: f64,
    pub all_hold: bool,
}

/// Cycle-independent data: spectral gap, sampled norm constants and the
/// factorization used for the least-norm solves.
pub struct TheoremAVerifier<'a> {
    w: &'a WhitneyStructure,
    d: &'a DualComplex,
    n_star: usize,
    lambda_w: f64,
    sampled_b: f64,
    d_hat: f64,
    /// Cholesky factor of `M₁`.
    l: DMatrix<f64>,
    /// SVD of `d₁ L⁻ᵀ`.
    svd: SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl<'a> TheoremAVerifier<'a> {
    pub fn new(
        k: &OrientedComplex,
        w: &'a WhitneyStructure,
        d: &'a DualComplex,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if k.dim() != 3 {
            return Err(Error::DimensionNot3(k.dim()));
        }
        if w.dim() != 3 || d.dim() != 3 || w.count(1) != k.count(1) || d.count(1) != k.count(2) {
            return Err(Error::InvalidArgument("complex, Whitney structure and dual complex disagree".into()));
        }
        let lambda_w = w.coexact_gap(1)?.value;
        let sv = w.volume().sqrt();
        let n1 = k.count(1);
        let basis = (0..n1).map(|i| Cochain::basis(1, n1, i).coeffs);
        let random = (0..samples).map(|s| sample_vector(k, 1, seed.wrapping_add(1), s));
        let vectors: Vec<Vec<f64>> = basis.chain(random).collect();
        let sampled_b = vectors
            .par_iter()
            .map(|v| Ok(gromov_norm(v) / (sv * whitney_l2(w, &Cochain::new(1, v.clone()))?)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let m2 = w.mass(2)?;
        let d_hat = m2.diagonal().iter().fold(0.0f64, |m, v| m.max(v.sqrt()));
        let m1 = w.mass(1)?.to_dense();
        let chol = m1
            .cholesky()
            .ok_or_else(|| Error::SingularMass("degree-1 mass matrix".into()))?;
        let l = chol.l();
        let dt = w.coboundary(1)?.transpose().to_dense();
        let x = l
            .solve_lower_triangular(&dt)
            .ok_or_else(|| Error::SingularMass("triangular solve failed".into()))?;
        let svd = x.transpose().svd(true, true);
        Ok(TheoremAVerifier { w, d, n_star: star_bound(k), lambda_w, sampled_b, d_hat, l, svd })
    }

    pub fn verify(&self, path: &CellularPath) -> Result<TheoremAReport> {
        let (w, d) = (self.w, self.d);
        let a = &path.chain;
        if a.degree != 1 || a.len() != d.count(1) {
            return Err(Error::InvalidArgument("path chain does not live on this dual complex".into()));
        }
        let resid = d.boundary_matrix(1)?.mul_vec(&a.coeffs);
        let scale = gromov_norm(&a.coeffs).max(1.0);
        let r = resid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if r > 1e-9 * scale {
            return Err(Error::NotACycle(r));
        }
        let g = d.phi_inverse(a)?;
        let smax = self.svd.singular_values.iter().copied().fold(0.0, f64::max);
        let y = self
            .svd
            .solve(&DVector::from_column_slice(&g.coeffs), RANK_TOL * smax)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let omega_v = self
            .l
            .transpose()
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::SingularMass("triangular solve failed".into()))?;
        let omega = Cochain::new(1, omega_v.iter().copied().collect());
        let d_omega = w.apply_d(1, &omega.coeffs)?;
        let gap: f64 = d_omega.iter().zip(&g.coeffs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        if gap > 1e-8 * g.coeffs.iter().fold(1.0f64, |m, v| m.max(v.abs())) {
            return Err(Error::NotABoundary);
        }
        // ∂Φ(ω) = −Φ(dω) in degree one; keep whichever sign fills `a`
        let phi = d.phi(&omega)?;
        let b2 = d.boundary_matrix(2)?;
        let bd = b2.mul_vec(&phi.coeffs);
        let plus: f64 = bd.iter().zip(&a.coeffs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let minus: f64 = bd.iter().zip(&a.coeffs).map(|(p, q)| (p + q).abs()).fold(0.0, f64::max);
        let sign = if plus <= minus { 1.0 } else { -1.0 };
        if plus.min(minus) > 1e-8 * scale {
            return Err(Error::Numerical(format!("dual filling misses the cycle by {:e}", plus.min(minus))));
        }
        let filling_chain = Chain::new(2, phi.coeffs.iter().map(|v| sign * v).collect());
        let tau = d.subdivide_chain_barycentric(&filling_chain)?;

        let fill = fill_norm_dual(d, a, CellWeights::Fan, LpMode::Float)?.value;
        let scl_upper = 4.0 * fill;

        let vol = w.volume();
        let l2_omega = whitney_l2(w, &omega)?;
        let g_omega = gromov_norm(&omega.coeffs);
        let b_hat = self.sampled_b.max(g_omega / (vol.sqrt() * l2_omega));
        let l2_domega = whitney_l2(w, &Cochain::new(2, d_omega.clone()))?;
        let g_domega = gromov_norm(&d_omega);
        let g_a = gromov_norm(&a.coeffs);
        let len = path.word_length() as f64;
        let l_hat = len / path.length;
        let n = self.n_star as f64;
        let lam = self.lambda_w;
        let g_tau = gromov_norm(&tau.coeffs);
        let g_fill = gromov_norm(&filling_chain.coeffs);
        let sq = lam.sqrt();
        let steps = vec![
            ChainStep::new("scl_upper <= 4 |tau(A)|_G", scl_upper, Relation::Le, 4.0 * g_tau),
            ChainStep::new("|tau(A)|_G <= N |A|_G", g_tau, Relation::Le, n * g_fill),
            ChainStep::new("|A|_G = |omega|_G", g_fill, Relation::Eq, g_omega),
            ChainStep::new("|omega|_G <= B sqrt(vol) |omega|_2", g_omega, Relation::Le, b_hat * vol.sqrt() * l2_omega),
            ChainStep::new("|omega|_2 <= |d omega|_2 / sqrt(lambda_W)", l2_omega, Relation::Le, l2_domega / sq),
            ChainStep::new("|d omega|_2 <= D |d omega|_G", l2_domega, Relation::Le, self.d_hat * g_domega),
            ChainStep::new("|d omega|_G = |a|_G", g_domega, Relation::Eq, g_a),
            ChainStep::new("|a|_G <= len(c)", g_a, Relation::Le, len),
            ChainStep::new("len(c) = L |gamma|", len, Relation::Eq, l_hat * path.length),
            ChainStep::new(
                "scl_upper <= 4 N B D L sqrt(vol) |gamma| / sqrt(lambda_W)",
                scl_upper,
                Relation::Le,
                4.0 * n * b_hat * self.d_hat * l_hat * vol.sqrt() * path.length / sq,
            ),
        ];
        let bound_constant = 4.0 * n * b_hat * self.d_hat * l_hat / vol.sqrt();
        let a_hat = sq * scl_upper / (vol * path.length);
        let all_hold = steps.iter().all(|s| s.holds) && a_hat <= bound_constant * (1.0 + STEP_TOL);
        Ok(TheoremAReport {
            steps,
            constants: MeasuredConstants {
                b_hat,
                d_hat: self.d_hat,
                n_star: self.n_star,
                l_hat,
                lambda_w: lam,
                volume: vol,
            },
            gamma_length: path.length,
            word_length: path.word_length(),
            fill,
            scl_upper,
            filling_chain,
            omega,
            a_hat,
            bound_constant,
            slack: bound_constant / a_hat,
            all_hold,
        })
    }
}

/// One-shot form of [`TheoremAVerifier`].
pub fn theorem_a_verify(
    k: &OrientedComplex,
    w: &WhitneyStructure,
    d: &DualComplex,
    path: &CellularPath,
    samples: usize,
    seed: u64,
) -> Result<TheoremAReport> {
    TheoremAVerifier::new(k, w, d, samples, seed)?.verify(path)
}
