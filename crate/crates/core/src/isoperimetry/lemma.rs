use crate::complex::{Chain, Cochain};
use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, dot};
use crate::norms::{dual_l2, whitney_l2};
use crate::whitney::WhitneyStructure;

/// Coexactness threshold on the projection residual.
pub const COEXACT_TOL: f64 = 1e-8;

/// Exact unit chain attaining `‖f‖₂` for a coexact cochain `f`.
#[derive(Clone, Debug)]
pub struct DualityWitness {
    /// `a ∈ ∂C_{k+1}` with `‖a‖₂* = 1`.
    pub chain: Chain,
    /// `∫_a W(f) = f(a)`.
    pub value: f64,
    /// `‖f‖₂`.
    pub norm: f64,
    /// `value / norm`, zero for `f = 0`.
    pub ratio: f64,
    pub dual_norm: f64,
}

/// Builds `a` as the Euclidean projection of `M_k f` onto `∂C_{k+1}`,
/// normalized to unit dual norm, and checks `f(a) = ‖f‖₂` to `1e−8`
/// relative.
pub fn lemma41_check(w: &WhitneyStructure, f: &Cochain) -> Result<DualityWitness> {
    let k = f.degree;
    if k >= w.dim() {
        return Err(Error::DegreeOutOfRange { degree: k, dim: w.dim() });
    }
    if f.len() != w.count(k) {
        return Err(Error::DegreeMismatch { expected: w.count(k), got: f.len() });
    }
    if f.coeffs.iter().all(|v| *v == 0.0) {
        return Ok(DualityWitness {
            chain: Chain::zeros(k, f.len()),
            value: 0.0,
            norm: 0.0,
            ratio: 0.0,
            dual_norm: 0.0,
        });
    }
    let res = w.coexact_residual(f)?;
    if res > COEXACT_TOL {
        return Err(Error::NotCoexact(res));
    }
    let mf = w.mass(k)?.mul_vec(&f.coeffs);
    // ∂_{k+1} = d_kᵀ, so the image is spanned by columns of dᵀ
    let d = w.coboundary(k)?;
    let dt = d.transpose();
    let ddt = d.matmul(&dt);
    let (y, _) = conjugate_gradient(&ddt, &d.mul_vec(&mf), 1e-14, 20 * ddt.nrows() + 100);
    let proj = dt.mul_vec(&y);
    let (dn, _) = dual_l2(w, &Chain::new(k, proj.clone()))?;
    if dn == 0.0 {
        return Err(Error::Numerical("projection onto the boundaries vanished".into()));
    }
    let chain = Chain::new(k, proj.iter().map(|v| v / dn).collect());
    let value = dot(&f.coeffs, &chain.coeffs);
    let norm = whitney_l2(w, f)?;
    let ratio = value / norm;
    if (ratio - 1.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!("duality pairing ratio {ratio} differs from 1")));
    }
    let (dual_norm, _) = dual_l2(w, &chain)?;
    Ok(DualityWitness { chain, value, norm, ratio, dual_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::torus_mesh;
    use crate::whitney::WhitneyOptions;

    #[test]
    fn gap_eigencochain_attains_its_norm() {
        let t = torus_mesh(4, 2, 0.25).unwrap();
        let w = WhitneyStructure::assemble(&t.complex, &t.metric, WhitneyOptions::default()).unwrap();
        let f = Cochain::new(1, w.coexact_gap(1).unwrap().vector);
        let r = lemma41_check(&w, &f).unwrap();
        assert!(r.ratio >= 1.0 - 1e-8 && r.ratio <= 1.0 + 1e-12);
        assert!((r.dual_norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_input_is_rejected() {
        let t = torus_mesh(4, 2, 0.25).unwrap();
        let w = WhitneyStructure::assemble(&t.complex, &t.metric, WhitneyOptions::default()).unwrap();
        let g: Vec<f64> = (0..w.count(0)).map(|i| (i as f64).sin()).collect();
        let f = Cochain::new(1, w.apply_d(0, &g).unwrap());
        assert!(matches!(lemma41_check(&w, &f), Err(Error::NotCoexact(_))));
        let z = lemma41_check(&w, &Cochain::zeros(1, w.count(1))).unwrap();
        assert_eq!(z.value, 0.0);
    }
}
