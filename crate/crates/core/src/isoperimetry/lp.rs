//! Dense two-phase simplex for `min cᵀx, Ax = b, x ≥ 0`, generic over `f64`
//! and exact rationals.

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Consecutive degenerate pivots tolerated before switching from Dantzig
/// pricing to Bland's rule for the rest of the solve.
const DEGENERATE_STREAK: usize = 50;

pub(crate) trait Field:
    Clone + Zero + One + Signed + PartialOrd + Send + Sync + std::fmt::Debug
{
    fn tol() -> Self;
    fn to_f64(&self) -> f64;
    fn from_f64(x: f64) -> Option<Self>;
    fn to_rational(&self) -> BigRational;
}

impl Field for f64 {
    fn tol() -> Self {
        1e-10
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).unwrap_or_default()
    }
}

impl Field for BigRational {
    fn tol() -> Self {
        BigRational::zero()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Option<Self> {
        <BigRational as FromPrimitive>::from_f64(x)
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
}

fn positive<T: Field>(x: &T) -> bool {
    *x > T::tol()
}

fn negligible<T: Field>(x: &T) -> bool {
    x.abs() <= T::tol()
}

#[derive(Clone, Debug)]
pub(crate) struct LpSolution<T> {
    pub x: Vec<T>,
    /// Multipliers of the equality rows: `cᵀx = yᵀb` at the optimum and
    /// `c − Aᵀy ≥ 0`.
    pub y: Vec<T>,
}

#[derive(Debug)]
pub(crate) enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible,
}

struct Tableau<T> {
    /// Rows `[a_i | b_i]`.
    rows: Vec<Vec<T>>,
    /// Reduced costs with `−z` in the last slot.
    cost: Vec<T>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: Field> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pr = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<T>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (v, q) in row.iter_mut().zip(&pr) {
                if !q.is_zero() {
                    *v = v.clone() - f.clone() * q.clone();
                }
            }
        };
        self.rows.par_iter_mut().enumerate().for_each(|(i, row)| {
            if i != r {
                eliminate(row)
            }
        });
        eliminate(&mut self.cost);
        self.rows[r] = pr;
        self.basis[r] = c;
    }

    /// Runs simplex iterations with entering candidates `0..allowed`.
    fn run(&mut self, allowed: usize) -> Result<()> {
        let m = self.rows.len();
        let limit = 50 * (m + self.width) + 1000;
        let mut bland = false;
        let mut streak = 0;
        let rhs = self.width;
        for _ in 0..limit {
            let mut enter: Option<usize> = None;
            for j in 0..allowed {
                let d = &self.cost[j];
                if !(d.is_negative() && !negligible(d)) {
                    continue;
                }
                match enter {
                    None => enter = Some(j),
                    Some(e) if !bland && *d < self.cost[e] => enter = Some(j),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..m {
                let a = &self.rows[i][c];
                if !positive(a) {
                    continue;
                }
                let ratio = self.rows[i][rhs].clone() / a.clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let diff = ratio.clone() - br.clone();
                        if diff.is_negative() && !negligible(&diff)
                            || negligible(&diff) && self.basis[i] < self.basis[bi]
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, step)) = leave else {
                return Err(Error::Numerical("linear program is unbounded".into()));
            };
            if negligible(&step) {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::Numerical("simplex iteration limit reached".into()))
    }
}

/// Solves `min cᵀx` subject to `a x = b`, `x ≥ 0`; `a` is given by rows.
pub(crate) fn solve<T: Field>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpOutcome<T>> {
    let m = a.len();
    let ns = c.len();
    let width = ns + m;
    let mut flip = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        flip[i] = b[i].is_negative();
        let s = if flip[i] { -T::one() } else { T::one() };
        let mut row = Vec::with_capacity(width + 1);
        row.extend(a[i].iter().map(|v| v.clone() * s.clone()));
        row.extend((0..m).map(|j| if j == i { T::one() } else { T::zero() }));
        row.push(b[i].clone() * s);
        rows.push(row);
    }
    let mut cost = vec![T::zero(); width + 1];
    for row in &rows {
        for j in 0..ns {
            cost[j] = cost[j].clone() - row[j].clone();
        }
        cost[width] = cost[width].clone() - row[width].clone();
    }
    let scale = rows.iter().fold(T::one(), |s, r| s + r[width].clone());
    let mut t = Tableau { rows, cost, basis: (ns..width).collect(), width };
    t.run(ns)?;
    let infeasibility = -t.cost[width].clone();
    if infeasibility > T::tol() * scale * T::from_f64(10.0).expect("finite") {
        return Ok(LpOutcome::Infeasible);
    }
    // drive artificial variables out of the basis; rows with nothing left
    // to pivot on are redundant
    for r in 0..m {
        if t.basis[r] < ns {
            continue;
        }
        let mut best: Option<usize> = None;
        for j in 0..ns {
            if !negligible(&t.rows[r][j])
                && best.is_none_or(|bj| t.rows[r][j].abs() > t.rows[r][bj].abs())
            {
                best = Some(j);
            }
        }
        match best {
            Some(j) => t.pivot(r, j),
            None => {
                for v in t.rows[r].iter_mut().take(ns) {
                    *v = T::zero();
                }
                t.rows[r][width] = T::zero();
            }
        }
    }
    let mut cost = vec![T::zero(); width + 1];
    cost[..ns].clone_from_slice(c);
    for (r, row) in t.rows.iter().enumerate() {
        let cb = if t.basis[r] < ns { c[t.basis[r]].clone() } else { T::zero() };
        if cb.is_zero() {
            continue;
        }
        for j in 0..=width {
            cost[j] = cost[j].clone() - cb.clone() * row[j].clone();
        }
    }
    t.cost = cost;
    t.run(ns)?;
    let mut x = vec![T::zero(); ns];
    for (r, &j) in t.basis.iter().enumerate() {
        if j < ns {
            x[j] = t.rows[r][width].clone();
        }
    }
    let y = (0..m)
        .map(|i| {
            let v = -t.cost[ns + i].clone();
            if flip[i] {
                -v
            } else {
                v
            }
        })
        .collect();
    Ok(LpOutcome::Optimal(LpSolution { x, y }))
}
