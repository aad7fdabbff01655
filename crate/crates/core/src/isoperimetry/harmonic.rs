use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::dual::DualComplex;
use crate::complex::homology::exact_rank;
use crate::complex::{Chain, IncidenceMatrix};
use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, dot, norm2, CsrMatrix};

const CG_TOL: f64 = 1e-14;

/// Tolerance on `‖∂₁h‖` and `‖∂₂ᵀh‖` relative to `‖h‖`.
pub const HARMONIC_TOL: f64 = 1e-10;

/// Orthonormal basis of `ker ∂₁ ∩ ker ∂₂ᵀ` in `C₁(K*)`.
#[derive(Clone, Debug)]
pub struct HarmonicChainBasis {
    pub basis: Vec<Vec<f64>>,
    pub dim: usize,
    /// Largest relative `‖∂₁h‖` or `‖∂₂ᵀh‖` over the basis.
    pub residual: f64,
}

/// `a = a_h + ∂S` with `S` of minimum Euclidean norm.
#[derive(Clone, Debug)]
pub struct EuclideanSplit {
    pub harmonic: Chain,
    pub filling: Chain,
    pub boundary: Chain,
    /// `‖a − a_h − ∂S‖ / ‖a‖`; zero up to rounding for cycles.
    pub residual: f64,
}

/// Euclidean projection onto the image of `a` (`rows × cols`): returns
/// `(x, a x)` with `aᵀa x = aᵀv`.
fn project_image(a: &CsrMatrix, at: &CsrMatrix, ata: &CsrMatrix, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let rhs = at.mul_vec(v);
    let (x, _) = conjugate_gradient(ata, &rhs, CG_TOL, 20 * ata.nrows() + 100);
    let ax = a.mul_vec(&x);
    (x, ax)
}

struct Operators {
    d1: CsrMatrix,
    d1t: CsrMatrix,
    d1d1t: CsrMatrix,
    d2: CsrMatrix,
    d2t: CsrMatrix,
    d2td2: CsrMatrix,
    d2d2t: CsrMatrix,
}

impl Operators {
    fn new(d: &DualComplex) -> Result<(Self, IncidenceMatrix, IncidenceMatrix)> {
        let b1 = d.boundary_matrix(1)?;
        let b2 = if d.dim() >= 2 {
            d.boundary_matrix(2)?
        } else {
            IncidenceMatrix::zeros(d.count(1), 0)
        };
        let d1 = CsrMatrix::from_incidence(&b1);
        let d2 = CsrMatrix::from_incidence(&b2);
        let d1t = d1.transpose();
        let d2t = d2.transpose();
        let ops = Operators {
            d1d1t: d1.matmul(&d1t),
            d2td2: d2t.matmul(&d2),
            d2d2t: d2.matmul(&d2t),
            d1,
            d1t,
            d2,
            d2t,
        };
        Ok((ops, b1, b2))
    }

    /// Removes the components in `im ∂₂` and `im ∂₁ᵀ`.
    fn harmonic_part(&self, v: &[f64]) -> Vec<f64> {
        let (_, p2) = project_image(&self.d2, &self.d2t, &self.d2td2, v);
        // im ∂₁ᵀ: solve ∂₁∂₁ᵀ y = ∂₁ v
        let rhs = self.d1.mul_vec(v);
        let (y, _) = conjugate_gradient(&self.d1d1t, &rhs, CG_TOL, 20 * self.d1d1t.nrows() + 100);
        let p1 = self.d1t.mul_vec(&y);
        v.iter().zip(&p2).zip(&p1).map(|((a, b), c)| a - b - c).collect()
    }

    fn residual(&self, h: &[f64]) -> f64 {
        let n = norm2(h).max(f64::MIN_POSITIVE);
        (norm2(&self.d1.mul_vec(h)) / n).max(norm2(&self.d2t.mul_vec(h)) / n)
    }
}

/// Harmonic 1-chains of the dual complex. The dimension is `b₁` from exact
/// integer ranks; the basis comes from projecting seeded random chains off
/// the boundaries and the coboundaries and orthonormalizing.
pub fn harmonic_chains(d: &DualComplex) -> Result<HarmonicChainBasis> {
    let (ops, b1, b2) = Operators::new(d)?;
    let n1 = d.count(1);
    let dim = n1 - exact_rank(&b1) - if b2.ncols() > 0 { exact_rank(&b2) } else { 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x4a52_6d11);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut attempts = 0;
    while basis.len() < dim {
        attempts += 1;
        if attempts > dim + 20 {
            return Err(Error::Numerical("harmonic chains: projections keep degenerating".into()));
        }
        let v: Vec<f64> = (0..n1).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut h = ops.harmonic_part(&v);
        // second pass tightens the projection
        h = ops.harmonic_part(&h);
        let before = norm2(&h);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&h, b);
                h.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nrm = norm2(&h);
        if nrm <= 1e-6 * before.max(f64::MIN_POSITIVE) || nrm == 0.0 {
            continue;
        }
        h.iter_mut().for_each(|x| *x /= nrm);
        basis.push(h);
    }
    let residual = basis.iter().map(|h| ops.residual(h)).fold(0.0, f64::max);
    if residual > HARMONIC_TOL {
        return Err(Error::Numerical(format!("harmonic chain residual {residual:e}")));
    }
    Ok(HarmonicChainBasis { basis, dim, residual })
}

impl HarmonicChainBasis {
    /// Euclidean-orthogonal projection onto the harmonic subspace.
    pub fn project(&self, a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len()];
        for h in &self.basis {
            let c = dot(a, h);
            out.iter_mut().zip(h).for_each(|(x, y)| *x += c * y);
        }
        out
    }
}

/// Splits a dual 1-chain as `a = a_h + ∂S`.
pub fn euclidean_project(d: &DualComplex, basis: &HarmonicChainBasis, a: &Chain) -> Result<EuclideanSplit> {
    if a.degree != 1 || a.len() != d.count(1) {
        return Err(Error::InvalidArgument("expected a 1-chain of the dual complex".into()));
    }
    let (ops, _, _) = Operators::new(d)?;
    let ah = basis.project(&a.coeffs);
    let r: Vec<f64> = a.coeffs.iter().zip(&ah).map(|(x, y)| x - y).collect();
    let (s0, ds0) = project_image(&ops.d2, &ops.d2t, &ops.d2td2, &r);
    // minimum-norm representative: S = ∂₂ᵀ y with ∂₂∂₂ᵀ y = ∂₂ S₀
    let s = if s0.iter().all(|v| *v == 0.0) {
        s0
    } else {
        let (y, _) = conjugate_gradient(&ops.d2d2t, &ds0, CG_TOL, 20 * ops.d2d2t.nrows() + 100);
        ops.d2t.mul_vec(&y)
    };
    let ds = ops.d2.mul_vec(&s);
    let rest: Vec<f64> = r.iter().zip(&ds).map(|(x, y)| x - y).collect();
    let residual = norm2(&rest) / norm2(&a.coeffs).max(f64::MIN_POSITIVE);
    Ok(EuclideanSplit {
        harmonic: Chain::new(1, ah),
        filling: Chain::new(2, s),
        boundary: Chain::new(1, ds),
        residual,
    })
}
