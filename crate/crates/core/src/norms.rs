//! Combinatorial and Whitney norms, the dual Whitney norm on chains and
//! empirical comparison constants between them.

use rayon::prelude::*;

use crate::complex::{Chain, Cochain, OrientedComplex};
use crate::error::{Error, Result};
use crate::whitney::WhitneyStructure;

pub use crate::whitney::whitney_linf;

/// `ℓ¹` norm of the coefficients.
pub fn gromov_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// `ℓ²` norm of the coefficients.
pub fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `ℓ^∞` norm of the coefficients.
pub fn max_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `‖f‖₂ = √(fᵀ M_k f)`.
pub fn whitney_l2(w: &WhitneyStructure, f: &Cochain) -> Result<f64> {
    Ok(w.inner(f.degree, &f.coeffs, &f.coeffs)?.max(0.0).sqrt())
}

/// Dual norm `‖a‖₂* = √(aᵀ M_k⁻¹ a)` and the unit-norm cochain attaining
/// `f(a) = ‖a‖₂*` (zero for `a = 0`).
pub fn dual_l2(w: &WhitneyStructure, a: &Chain) -> Result<(f64, Cochain)> {
    if a.degree > w.dim() || a.len() != w.count(a.degree) {
        return Err(Error::DegreeMismatch { expected: w.count(a.degree.min(w.dim())), got: a.len() });
    }
    let x = w.mass_solve(a.degree, &a.coeffs)?;
    let v: f64 = x.iter().zip(&a.coeffs).map(|(p, q)| p * q).sum();
    if v < 0.0 {
        return Err(Error::SingularMass(format!("negative dual quadratic form {v:e}")));
    }
    let nrm = v.sqrt();
    if nrm == 0.0 {
        return Ok((0.0, Cochain::zeros(a.degree, a.len())));
    }
    Ok((nrm, Cochain::new(a.degree, x.into_iter().map(|c| c / nrm).collect())))
}

/// One measured comparison constant.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub complex: String,
    /// Norm pair, e.g. `gromov/l2`.
    pub pair: String,
    pub degree: usize,
    pub samples: usize,
    pub max_ratio: f64,
    /// The constant as defined for the pair (volume-normalized where the
    /// comparison carries `√vol`).
    pub constant: f64,
    pub seed: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Coefficient in `[−1, 1)` for one simplex in one sample, keyed by the
/// vertex labels so that relabelling the complex leaves samples unchanged.
fn sample_value(seed: u64, sample: usize, labels: &[i64]) -> f64 {
    let mut h = mix(seed ^ mix(sample as u64));
    for &l in labels {
        h = mix(h ^ l as u64);
    }
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

pub(crate) fn sample_vector(k: &OrientedComplex, deg: usize, seed: u64, sample: usize) -> Vec<f64> {
    let lab = k.labels();
    k.simplices(deg)
        .iter()
        .map(|s| {
            let mut l: Vec<i64> = s.iter().map(|&v| lab[v]).collect();
            l.sort_unstable();
            sample_value(seed, sample, &l)
        })
        .collect()
}

/// Measures, in every degree, `B̂ = max ‖f‖_G / (√vol ‖f‖₂)` over cochains,
/// its chain variant `max ‖a‖_G / (√vol ‖a‖₂*)`, and
/// `D̂ = max ‖f‖₂ / ‖f‖_G`. Basis elements are always part of the sample.
pub fn compare_constants(
    id: &str,
    k: &OrientedComplex,
    w: &WhitneyStructure,
    samples: usize,
    seed: u64,
) -> Result<Vec<NormReport>> {
    let sv = w.volume().sqrt();
    let mut out = Vec::new();
    for deg in 0..=k.dim() {
        let n = k.count(deg);
        let basis = (0..n).map(|i| Cochain::basis(deg, n, i).coeffs);
        let random = (0..samples).map(|s| sample_vector(k, deg, seed.wrapping_add(deg as u64), s));
        let vectors: Vec<Vec<f64>> = basis.chain(random).collect();
        let ratios: Vec<(f64, f64, f64)> = vectors
            .par_iter()
            .map(|v| {
                let g = gromov_norm(v);
                let l2 = whitney_l2(w, &Cochain::new(deg, v.clone()))?;
                let (dual, _) = dual_l2(w, &Chain::new(deg, v.clone()))?;
                Ok((g / l2, g / dual, l2 / g))
            })
            .collect::<Result<_>>()?;
        let max = |f: fn(&(f64, f64, f64)) -> f64| ratios.iter().map(f).fold(0.0, f64::max);
        let (b, bd, d) = (max(|r| r.0), max(|r| r.1), max(|r| r.2));
        for (pair, ratio, constant) in [
            ("gromov/l2", b, b / sv),
            ("gromov/dual_l2", bd, bd / sv),
            ("l2/gromov", d, d),
        ] {
            if !(ratio.is_finite() && ratio > 0.0) {
                return Err(Error::Numerical(format!("non-finite ratio for {pair} in degree {deg}")));
            }
            out.push(NormReport {
                complex: id.to_string(),
                pair: pair.to_string(),
                degree: deg,
                samples: vectors.len(),
                max_ratio: ratio,
                constant,
                seed,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_norms() {
        let x = [3.0, -4.0];
        assert_eq!((gromov_norm(&x), euclidean_norm(&x), max_norm(&x)), (7.0, 5.0, 4.0));
    }

    #[test]
    fn samples_depend_on_labels_only() {
        assert_eq!(sample_value(1, 2, &[3, 5]), sample_value(1, 2, &[3, 5]));
        assert_ne!(sample_value(1, 2, &[3, 5]), sample_value(1, 3, &[3, 5]));
        let v = sample_value(9, 0, &[1]);
        assert!((-1.0..1.0).contains(&v));
    }
}
