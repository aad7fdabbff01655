use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Signed;

use super::lp::{self, Field, LpOutcome};
use crate::complex::dual::DualComplex;
use crate::complex::{Chain, IncidenceMatrix, OrientedComplex};
use crate::error::{Error, Result};

/// Largest number of LP variables (both signs of every 2-cell) accepted in
/// exact mode.
pub const RATIONAL_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LpMode {
    #[default]
    Float,
    Rational,
}

impl FromStr for LpMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(LpMode::Float),
            "rational" => Ok(LpMode::Rational),
            other => Err(Error::InvalidArgument(format!("unknown LP mode `{other}`"))),
        }
    }
}

impl fmt::Display for LpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpMode::Float => "float",
            LpMode::Rational => "rational",
        })
    }
}

/// How a dual 2-cell is charged in the Gromov norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellWeights {
    /// One per cell.
    Unit,
    /// One per fan triangle, i.e. the number of sides; this is the Gromov
    /// norm of the subdivided chain.
    Fan,
}

#[derive(Clone, Debug)]
pub struct FillCertificate {
    pub cycle_id: String,
    /// `‖A‖_G` of the witness.
    pub value: f64,
    pub exact_value: Option<BigRational>,
    /// Optimal 2-chain with `∂A = z`.
    pub chain: Chain,
    pub exact_chain: Option<Vec<BigRational>>,
    pub mode: LpMode,
    /// Dual certificate: a 1-cochain `u` with `|(∂ᵀu)_c| ≤ w_c` and
    /// `u(z) = value`.
    pub dual: Vec<f64>,
    /// `max |∂A − z|`.
    pub boundary_residual: f64,
    /// `|u(z) − value|`.
    pub duality_gap: f64,
    /// `max_c |(∂ᵀu)_c| / w_c`, at most one for a feasible dual point.
    pub dual_infeasibility: f64,
}

/// Filling norm of a 1-cycle of `K` with one unit of mass per 2-simplex.
pub fn fill_norm(k: &OrientedComplex, z: &Chain, mode: LpMode) -> Result<FillCertificate> {
    let d1 = k.boundary_matrix(1)?;
    let d2 = if k.dim() >= 2 { k.boundary_matrix(2)? } else { IncidenceMatrix::zeros(k.count(1), 0) };
    let w = vec![1.0; d2.ncols()];
    fill_with(&d1, &d2, &w, z, mode)
}

/// Filling norm of a cellular 1-cycle of `K*`.
pub fn fill_norm_dual(
    d: &DualComplex,
    z: &Chain,
    weights: CellWeights,
    mode: LpMode,
) -> Result<FillCertificate> {
    if d.dim() < 2 {
        return Err(Error::DegreeOutOfRange { degree: 2, dim: d.dim() });
    }
    let d1 = d.boundary_matrix(1)?;
    let d2 = d.boundary_matrix(2)?;
    let w = (0..d2.ncols())
        .map(|c| match weights {
            CellWeights::Unit => 1.0,
            CellWeights::Fan => d.sides(c) as f64,
        })
        .collect::<Vec<_>>();
    fill_with(&d1, &d2, &w, z, mode)
}

/// `scl` upper bound `4·fill(z)`. Simplicial fillings in a fixed complex are
/// a subclass of singular fillings, so this bounds `scl` of every loop
/// representing `z` from above.
pub fn scl_upper(k: &OrientedComplex, z: &Chain, mode: LpMode) -> Result<f64> {
    Ok(4.0 * fill_norm(k, z, mode)?.value)
}

/// Minimizes `Σ w_c |A_c|` subject to `d2 A = z` after checking `d1 z = 0`.
pub fn fill_with(
    d1: &IncidenceMatrix,
    d2: &IncidenceMatrix,
    weights: &[f64],
    z: &Chain,
    mode: LpMode,
) -> Result<FillCertificate> {
    if z.degree != 1 {
        return Err(Error::DegreeMismatch { expected: 1, got: z.degree });
    }
    if z.len() != d2.nrows() || weights.len() != d2.ncols() {
        return Err(Error::InvalidArgument("cycle length does not match the complex".into()));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidArgument("cell weights must be positive".into()));
    }
    match mode {
        LpMode::Float => fill_generic::<f64>(d1, d2, weights, z, mode),
        LpMode::Rational => {
            if 2 * d2.ncols() > RATIONAL_LIMIT {
                return Err(Error::ProblemTooLarge(2 * d2.ncols()));
            }
            fill_generic::<BigRational>(d1, d2, weights, z, mode)
        }
    }
}

fn convert<T: Field>(x: f64) -> Result<T> {
    T::from_f64(x).ok_or_else(|| Error::InvalidArgument(format!("coefficient {x} is not finite")))
}

fn fill_generic<T: Field>(
    d1: &IncidenceMatrix,
    d2: &IncidenceMatrix,
    weights: &[f64],
    z: &Chain,
    mode: LpMode,
) -> Result<FillCertificate> {
    let zq: Vec<T> = z.coeffs.iter().map(|&x| convert(x)).collect::<Result<_>>()?;
    let scale = z.coeffs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut bd = vec![T::zero(); d1.nrows()];
    for (j, col) in d1.columns().iter().enumerate() {
        for &(i, s) in col {
            bd[i] = bd[i].clone() + zq[j].clone() * convert::<T>(s as f64)?;
        }
    }
    let resid = bd.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let cycle_ok = match mode {
        LpMode::Float => resid <= 1e-9 * scale,
        LpMode::Rational => bd.iter().all(|v| v.is_zero()),
    };
    if !cycle_ok {
        return Err(Error::NotACycle(resid));
    }
    let nc = d2.ncols();
    let m = d2.nrows();
    let mut a = vec![vec![T::zero(); 2 * nc]; m];
    for (c, col) in d2.columns().iter().enumerate() {
        for &(i, s) in col {
            let v = convert::<T>(s as f64)?;
            a[i][c] = v.clone();
            a[i][nc + c] = -v;
        }
    }
    let w: Vec<T> = weights.iter().map(|&x| convert(x)).collect::<Result<_>>()?;
    let cost: Vec<T> = w.iter().chain(&w).cloned().collect();
    let sol = match lp::solve(&a, &zq, &cost)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(Error::NotABoundary),
    };
    let exact: Vec<T> = (0..nc).map(|c| sol.x[c].clone() - sol.x[nc + c].clone()).collect();
    let chain = Chain::new(2, exact.iter().map(|v| v.to_f64()).collect());
    let value_t = exact
        .iter()
        .zip(&w)
        .fold(T::zero(), |s, (x, wc)| s + x.abs() * wc.clone());
    let value = value_t.to_f64();
    let mut bd = vec![0.0; m];
    for (c, col) in d2.columns().iter().enumerate() {
        for &(i, s) in col {
            bd[i] += s as f64 * chain.coeffs[c];
        }
    }
    let boundary_residual = bd.iter().zip(&z.coeffs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let dual: Vec<f64> = sol.y.iter().map(|v| v.to_f64()).collect();
    let uz: f64 = dual.iter().zip(&z.coeffs).map(|(u, x)| u * x).sum();
    let dual_infeasibility = d2
        .columns()
        .iter()
        .zip(weights)
        .map(|(col, wc)| col.iter().map(|&(i, s)| s as f64 * dual[i]).sum::<f64>().abs() / wc)
        .fold(0.0, f64::max);
    let (exact_value, exact_chain) = match mode {
        LpMode::Rational => (Some(value_t.to_rational()), Some(exact.iter().map(Field::to_rational).collect())),
        LpMode::Float => (None, None),
    };
    Ok(FillCertificate {
        cycle_id: String::new(),
        value,
        exact_value,
        chain,
        exact_chain,
        mode,
        duality_gap: (uz - value).abs(),
        dual,
        boundary_residual,
        dual_infeasibility,
    })
}
