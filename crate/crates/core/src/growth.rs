//! The symplectic action on `H₁` of a genus-two surface used for the
//! exponential gap decay example: the matrix `F`, its invariant planes,
//! growth of iterates and the decay curve.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// `F` in the basis `e₁, …, e₄`: blocks `[[2,1],[1,1]]` on `U = ⟨e₁,e₂⟩`
/// and `[[1,−1],[−1,2]]` on `V = ⟨e₃,e₄⟩`.
pub const F: [[i64; 4]; 4] = [[2, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, -1], [0, 0, -1, 2]];

/// Standard symplectic form pairing `e₁` with `e₃` and `e₂` with `e₄`.
pub const J: [[i64; 4]; 4] = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];

/// Dominant eigenvalue `(3+√5)/2` of both blocks (`λ² − 3λ + 1`).
pub fn dominant_eigenvalue() -> f64 {
    (3.0 + 5f64.sqrt()) / 2.0
}

/// `r̂ = log((3+√5)/2)`.
pub fn decay_rate() -> f64 {
    dominant_eigenvalue().ln()
}

/// Which invariant plane plays the boundary role in the two halves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Marking {
    /// `V = ⟨e₃,e₄⟩` bounds.
    Plus,
    /// `U = ⟨e₁,e₂⟩` bounds.
    Minus,
}

#[derive(Clone, Copy, Debug)]
pub struct SymplecticAction {
    pub matrix: [[i64; 4]; 4],
}

impl Default for SymplecticAction {
    fn default() -> Self {
        SymplecticAction { matrix: F }
    }
}

fn matmul(a: &[[i64; 4]; 4], b: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut c = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn transpose(a: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut t = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

fn det(a: &[[i64; 4]; 4]) -> i64 {
    fn minor(m: &[Vec<i64>]) -> i64 {
        if m.len() == 1 {
            return m[0][0];
        }
        (0..m.len())
            .map(|c| {
                let sub: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * minor(&sub)
            })
            .sum()
    }
    minor(&a.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

impl SymplecticAction {
    /// `FᵀJF = J`, exactly.
    pub fn is_symplectic(&self) -> bool {
        matmul(&transpose(&self.matrix), &matmul(&J, &self.matrix)) == J
    }

    pub fn determinant(&self) -> i64 {
        det(&self.matrix)
    }

    /// `F` maps `U` into `U` and `V` into `V`.
    pub fn preserves_planes(&self) -> bool {
        let m = &self.matrix;
        (0..2).all(|j| m[2][j] == 0 && m[3][j] == 0) && (2..4).all(|j| m[0][j] == 0 && m[1][j] == 0)
    }

    /// `Fⁿ a` with exact integers.
    pub fn apply(&self, a: &[BigInt; 4], n: u32) -> [BigInt; 4] {
        let mut v = a.clone();
        for _ in 0..n {
            let mut w: [BigInt; 4] = Default::default();
            for (i, wi) in w.iter_mut().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    if self.matrix[i][j] != 0 {
                        *wi += vj * self.matrix[i][j];
                    }
                }
            }
            v = w;
        }
        v
    }
}

/// `Fⁿ a` for the fixed matrix `F`.
pub fn apply_f(a: &[i64; 4], n: u32) -> [BigInt; 4] {
    let a = a.map(BigInt::from);
    SymplecticAction::default().apply(&a, n)
}

/// Vector norm used for the growth ratios. Growth rates agree for all of
/// them; the Euclidean one is the stable norm proxy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VectorNorm {
    L1,
    #[default]
    L2,
    LInf,
}

fn norm(v: &[BigInt; 4], which: VectorNorm) -> f64 {
    // rescale by a power of two so huge iterates stay in range
    let bits = v.iter().map(|x| x.bits()).max().unwrap_or(0);
    let shift = bits.saturating_sub(900);
    let f: Vec<f64> = v.iter().map(|x| (x >> shift).to_f64().unwrap_or(f64::NAN)).collect();
    let s = match which {
        VectorNorm::L1 => f.iter().map(|x| x.abs()).sum(),
        VectorNorm::L2 => f.iter().map(|x| x * x).sum::<f64>().sqrt(),
        VectorNorm::LInf => f.iter().fold(0.0f64, |m, x| m.max(x.abs())),
    };
    s * 2f64.powi(shift as i32)
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub class: [i64; 4],
    pub iterations: u32,
    pub norm: VectorNorm,
    /// `‖Fⁿ a‖` for `n = 0..=iterations` (stable norm proxy).
    pub norms: Vec<f64>,
    /// `‖Fⁿ⁺¹a‖ / ‖Fⁿa‖`.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log ‖Fⁿa‖` over the second half of the run.
    pub fitted_rate: f64,
    /// Last ratio minus `(3+√5)/2`.
    pub limit_error: f64,
}

/// Growth of `‖Fⁿ a‖`.
pub fn growth_rate(a: &[i64; 4], n_max: u32, which: VectorNorm) -> Result<GrowthReport> {
    if a.iter().all(|x| *x == 0) {
        return Err(Error::ZeroClass);
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("need at least one iteration".into()));
    }
    // pairing with the dominant eigenvectors (φ, 1) on U and (1, 1−λ) on V
    let l = dominant_eigenvalue();
    let u_comp = (l - 1.0) * a[0] as f64 + a[1] as f64;
    let v_comp = a[2] as f64 + (1.0 - l) * a[3] as f64;
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs() as f64));
    if u_comp.abs() <= 1e-12 * scale && v_comp.abs() <= 1e-12 * scale {
        return Err(Error::DegenerateClass);
    }
    let f = SymplecticAction::default();
    let mut v = a.map(BigInt::from);
    let mut norms = vec![norm(&v, which)];
    for _ in 0..n_max {
        v = f.apply(&v, 1);
        norms.push(norm(&v, which));
    }
    let ratios: Vec<f64> = norms.windows(2).map(|w| w[1] / w[0]).collect();
    let start = norms.len() / 2;
    let pts: Vec<(f64, f64)> = (start..norms.len()).map(|i| (i as f64, norms[i].ln())).collect();
    let fitted_rate = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        ratios[0].ln()
    };
    let limit_error = ratios.last().copied().unwrap_or(f64::NAN) - l;
    Ok(GrowthReport { class: *a, iterations: n_max, norm: which, norms, ratios, fitted_rate, limit_error })
}

/// Whether `a` bounds on both sides: it must lie in the boundary plane of
/// each marking, and `V ∩ U = 0`, so this holds exactly for `a = 0`.
pub fn bounds_both_sides(a: &[i64; 4]) -> bool {
    in_boundary_plane(a, Marking::Plus) && in_boundary_plane(a, Marking::Minus)
}

pub fn in_boundary_plane(a: &[i64; 4], m: Marking) -> bool {
    match m {
        Marking::Plus => a[0] == 0 && a[1] == 0,
        Marking::Minus => a[2] == 0 && a[3] == 0,
    }
}

/// Constants of the decay estimate. The analytic constants exist but are
/// not numerically specified, so they are user inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayConstants {
    pub d: f64,
    pub length_bound: f64,
    /// Volume slope `C` in `vol(W_n) ≈ C n`.
    pub volume_slope: f64,
    /// Bi-Lipschitz constant.
    pub k: f64,
}

impl Default for DecayConstants {
    fn default() -> Self {
        DecayConstants { d: 1.0, length_bound: 1.0, volume_slope: 1.0, k: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct DecayRow {
    pub n: u32,
    pub volume: f64,
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct DecayCurve {
    pub rate: f64,
    pub constants: DecayConstants,
    pub rows: Vec<DecayRow>,
    pub illustrative: bool,
}

/// Upper bound `2 K C D |γ| n e^{−r̂ n}` on `√λ(W_n)` for each `n`.
pub fn decay_curve(ns: std::ops::RangeInclusive<u32>, c: DecayConstants) -> Result<DecayCurve> {
    for (name, v) in [("D", c.d), ("length_bound", c.length_bound), ("C", c.volume_slope), ("K", c.k)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveConstant(name.into()));
        }
    }
    let rate = decay_rate();
    let rows = ns
        .map(|n| {
            let nf = n as f64;
            DecayRow {
                n,
                volume: c.volume_slope * nf,
                bound: 2.0 * c.k * c.volume_slope * c.d * c.length_bound * nf * (-rate * nf).exp(),
            }
        })
        .collect();
    Ok(DecayCurve { rate, constants: c, rows, illustrative: c == DecayConstants::default() })
}

impl DecayCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        if self.illustrative {
            let _ = writeln!(s, "# illustrative constants: D = K = C = |gamma| = 1");
        }
        let _ = writeln!(s, "# r_hat = {:.16e}", self.rate);
        let _ = writeln!(s, "n,volume,bound");
        for r in &self.rows {
            let _ = writeln!(s, "{},{:.16e},{:.16e}", r.n, r.volume, r.bound);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_of_f() {
        let e1 = apply_f(&[1, 0, 0, 0], 1);
        assert_eq!(e1, [2, 1, 0, 0].map(BigInt::from));
        let e3 = apply_f(&[0, 0, 1, 0], 1);
        assert_eq!(e3, [0, 0, 1, -1].map(BigInt::from));
        assert_eq!(apply_f(&[3, -1, 4, 1], 0), [3, -1, 4, 1].map(BigInt::from));
    }

    #[test]
    fn symplectic_and_unimodular() {
        let f = SymplecticAction::default();
        assert!(f.is_symplectic());
        assert_eq!(f.determinant(), 1);
        assert!(f.preserves_planes());
    }

    #[test]
    fn classes() {
        assert!(bounds_both_sides(&[0; 4]));
        assert!(!bounds_both_sides(&[1, 0, 0, 0]));
        assert!(!bounds_both_sides(&[0, 0, 1, 0]));
        assert_eq!(growth_rate(&[0; 4], 5, VectorNorm::L2).unwrap_err(), Error::ZeroClass);
    }

    #[test]
    fn decay_needs_positive_constants() {
        let c = DecayConstants { d: 0.0, ..Default::default() };
        assert!(matches!(decay_curve(1..=3, c), Err(Error::NonPositiveConstant(_))));
    }
}
