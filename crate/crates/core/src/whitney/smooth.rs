//! Clamped and mollified partition of unity on flat complexes.
//!
//! `b̄_i = max(0, ((n+2) b_i − 1)/(n+1))` is convolved with the radial bump
//! `η(r) = (1 − (r/ρ)²)³` inside a flat development of the star of `v_i`,
//! then normalized to `β_i = b̃_i / Σ_j b̃_j`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::complex::OrientedComplex;
use crate::error::{Error, Result};
use crate::geometry::{gauss_legendre01, Curvature, MetricData, QuadratureRule};

const SAMPLES_PER_EDGE: usize = 8;

struct ChartTop {
    pos: Vec<DVector<f64>>,
    /// Inverse of the edge matrix `[X_1 − X_0, …, X_n − X_0]`.
    inv: DMatrix<f64>,
    vpos: usize,
}

/// Flat development of the star of one vertex.
struct StarChart {
    tops: Vec<ChartTop>,
    index: HashMap<usize, usize>,
}

impl StarChart {
    fn build(k: &OrientedComplex, metric: &MetricData, v: usize) -> Result<Self> {
        let n = k.dim();
        let stars = k.top_cofaces(0, v);
        let vpos = |t: usize| -> Result<usize> {
            let s = k.simplex(n, t);
            let hits: Vec<usize> = (0..=n).filter(|&p| s[p] == v).collect();
            match hits.as_slice() {
                [p] => Ok(*p),
                _ => Err(Error::ChartUnavailable(format!("vertex {v} repeats in top simplex {t}"))),
            }
        };
        let mut placed: HashMap<usize, Vec<DVector<f64>>> = HashMap::new();
        let mut order = Vec::new();
        let first = stars[0];
        placed.insert(first, metric.realize(k, first)?.vertices);
        order.push(first);
        let mut head = 0;
        while head < order.len() {
            let t = order[head];
            head += 1;
            let p = vpos(t)?;
            for j in (0..=n).filter(|&j| j != p) {
                let f = k.faces(n, t)[j];
                for &u in k.cofaces(n - 1, f) {
                    if placed.contains_key(&u) {
                        continue;
                    }
                    let Some(ju) = (0..=n).find(|&jj| k.faces(n, u)[jj] == f) else { continue };
                    let x = develop(k, metric, &placed[&t], j, u, ju)?;
                    placed.insert(u, x);
                    order.push(u);
                }
            }
        }
        let mut tops = Vec::with_capacity(order.len());
        let mut index = HashMap::new();
        for t in order {
            let pos = placed.remove(&t).unwrap();
            let e = DMatrix::from_fn(n, n, |r, c| pos[c + 1][r] - pos[0][r]);
            let inv = e
                .try_inverse()
                .ok_or_else(|| Error::DegenerateSimplex(format!("top simplex {t} in star chart")))?;
            index.insert(t, tops.len());
            tops.push(ChartTop { pos, inv, vpos: vpos(t)? });
        }
        Ok(Self { tops, index })
    }

    /// `b_v(y)` for a chart point, zero outside the developed star.
    fn coordinate(&self, y: &DVector<f64>) -> f64 {
        for ct in &self.tops {
            let lam = &ct.inv * (y - &ct.pos[0]);
            let b0 = 1.0 - lam.sum();
            if b0 >= -1e-12 && lam.iter().all(|&x| x >= -1e-12) {
                return if ct.vpos == 0 { b0 } else { lam[ct.vpos - 1] };
            }
        }
        0.0
    }

    /// Chart point of barycentric point `b` of top simplex `t` and the edge
    /// vectors `E_i = X_i − X_0`.
    fn embed(&self, t: usize, b: &[f64]) -> (DVector<f64>, Vec<DVector<f64>>) {
        let ct = &self.tops[self.index[&t]];
        let mut y = DVector::zeros(ct.pos[0].len());
        for (a, p) in ct.pos.iter().enumerate() {
            y.axpy(b[a], p, 1.0);
        }
        let e = (1..ct.pos.len()).map(|i| &ct.pos[i] - &ct.pos[0]).collect();
        (y, e)
    }
}

/// Places top simplex `u` across its face `ju`, shared with the placed top
/// whose face `j` it is, on the side opposite the placed top.
fn develop(
    k: &OrientedComplex,
    metric: &MetricData,
    placed: &[DVector<f64>],
    j: usize,
    u: usize,
    ju: usize,
) -> Result<Vec<DVector<f64>>> {
    let n = k.dim();
    let canon = metric.realize(k, u)?.vertices;
    let fp: Vec<usize> = (0..=n).filter(|&p| p != j).collect();
    let fu: Vec<usize> = (0..=n).filter(|&p| p != ju).collect();
    let basis = |pts: &[DVector<f64>], f: &[usize]| {
        DMatrix::from_fn(n, n - 1, |r, c| pts[f[c + 1]][r] - pts[f[0]][r])
    };
    let ec = basis(&canon, &fu);
    let w = &canon[ju] - &canon[fu[0]];
    let gram = ec.transpose() * &ec;
    let coef = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateSimplex(format!("face of top simplex {u}")))?
        * (ec.transpose() * &w);
    let height = (&w - &ec * &coef).norm();
    let ep = basis(placed, &fp);
    let opp = &placed[j] - &placed[fp[0]];
    let gp = (ep.transpose() * &ep)
        .try_inverse()
        .ok_or_else(|| Error::DegenerateSimplex("shared face in star chart".into()))?;
    let r = &opp - &ep * (gp * (ep.transpose() * &opp));
    let normal = -r.normalize();
    let mut out = vec![DVector::zeros(n); n + 1];
    for (c, &p) in fu.iter().enumerate() {
        out[p] = placed[fp[c]].clone();
    }
    out[ju] = &placed[fp[0]] + &ep * coef + normal * height;
    Ok(out)
}

/// Ball quadrature for the mollifier: offsets and weights.
fn ball_rule(n: usize, rho: f64) -> Vec<(DVector<f64>, f64)> {
    let (rn, rw) = gauss_legendre01(6);
    let mut out = Vec::new();
    match n {
        1 => {
            for (x, w) in rn.iter().zip(&rw) {
                for s in [-1.0, 1.0] {
                    out.push((DVector::from_vec(vec![s * x * rho]), w * rho));
                }
            }
        }
        2 => {
            let na = 24;
            for (x, w) in rn.iter().zip(&rw) {
                let r = x * rho;
                for a in 0..na {
                    let th = 2.0 * std::f64::consts::PI * (a as f64 + 0.5) / na as f64;
                    let wt = w * rho * r * 2.0 * std::f64::consts::PI / na as f64;
                    out.push((DVector::from_vec(vec![r * th.cos(), r * th.sin()]), wt));
                }
            }
        }
        _ => {
            // 3D: radial × Gauss–Legendre in cos θ × uniform φ
            let (cn, cw) = gauss_legendre01(6);
            let nphi = 12;
            for (x, w) in rn.iter().zip(&rw) {
                let r = x * rho;
                for (c, cwt) in cn.iter().zip(&cw) {
                    let ct = 2.0 * c - 1.0;
                    let st = (1.0 - ct * ct).sqrt();
                    for a in 0..nphi {
                        let ph = 2.0 * std::f64::consts::PI * (a as f64 + 0.5) / nphi as f64;
                        let wt = w * rho * r * r * 2.0 * cwt * 2.0 * std::f64::consts::PI / nphi as f64;
                        out.push((DVector::from_vec(vec![r * st * ph.cos(), r * st * ph.sin(), r * ct]), wt));
                    }
                }
            }
        }
    }
    out
}

fn clamp(n: usize, b: f64) -> f64 {
    let nf = n as f64;
    (((nf + 2.0) * b - 1.0) / (nf + 1.0)).max(0.0)
}

/// Smoothed partition of unity together with its values at the nodes of a
/// quadrature rule on every top simplex.
pub struct SmoothPartition {
    dim: usize,
    delta: f64,
    rho: f64,
    charts: Vec<StarChart>,
    ball: Vec<(DVector<f64>, f64)>,
    /// `∫ η` over the ball.
    kernel_mass: f64,
    rule: QuadratureRule,
    tops: Vec<Vec<usize>>,
    /// Per top, per node: values and reference gradients per local vertex.
    nodes: Vec<Vec<(Vec<f64>, Vec<Vec<f64>>)>>,
}

impl std::fmt::Debug for SmoothPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothPartition")
            .field("dim", &self.dim)
            .field("delta", &self.delta)
            .field("rho", &self.rho)
            .finish_non_exhaustive()
    }
}

pub fn smooth_partition(k: &OrientedComplex, metric: &MetricData, q: &QuadratureRule) -> Result<SmoothPartition> {
    let n = k.dim();
    if metric.curvature != Curvature::Flat {
        return Err(Error::ChartUnavailable("mollification needs a flat complex".into()));
    }
    if !(1..=3).contains(&n) || q.dim != n {
        return Err(Error::ChartUnavailable(format!("dimension {n} not supported")));
    }
    let charts: Vec<StarChart> = (0..k.count(0))
        .into_par_iter()
        .map(|v| StarChart::build(k, metric, v))
        .collect::<Result<_>>()?;
    let delta = 0.9
        * charts
            .par_iter()
            .map(|c| support_gap(n, c))
            .reduce(|| f64::INFINITY, f64::min);
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Numerical("no positive mollification radius".into()));
    }
    let rho = 0.75 * delta;
    let ball = ball_rule(n, rho);
    let kernel_mass = ball.iter().map(|(y, w)| w * eta(y.norm() / rho)).sum();
    let mut p = SmoothPartition {
        dim: n,
        delta,
        rho,
        charts,
        ball,
        kernel_mass,
        rule: q.clone(),
        tops: k.simplices(n).to_vec(),
        nodes: Vec::new(),
    };
    let nodes = (0..k.count(n))
        .into_par_iter()
        .map(|t| q.nodes.iter().map(|b| p.evaluate(t, b)).collect())
        .collect();
    p.nodes = nodes;
    Ok(p)
}

fn eta(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(3)
    }
}

/// `dη/dr` at `r = sρ`.
fn eta_prime(s: f64, rho: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        -6.0 * s * (1.0 - s * s).powi(2) / rho
    }
}

/// Smallest sampled distance between `{b_v ≥ 1/(n+2)}` and the link of `v`
/// in the chart.
fn support_gap(n: usize, chart: &StarChart) -> f64 {
    let c = 1.0 / (n as f64 + 2.0);
    let grid = simplex_grid(n - 1, SAMPLES_PER_EDGE);
    let mut level = Vec::new();
    let mut link = Vec::new();
    for ct in &chart.tops {
        let others: Vec<usize> = (0..=n).filter(|&p| p != ct.vpos).collect();
        for g in &grid {
            for (bv, out) in [(c, &mut level), (0.0, &mut link)] {
                let mut y = &ct.pos[ct.vpos] * bv;
                for (i, &p) in others.iter().enumerate() {
                    y.axpy((1.0 - bv) * g[i], &ct.pos[p], 1.0);
                }
                out.push(y);
            }
        }
    }
    let mut best = f64::INFINITY;
    for a in &level {
        for b in &link {
            best = best.min((a - b).norm());
        }
    }
    best
}

/// Barycentric grid on the `d`-simplex with `m` steps per edge.
fn simplex_grid(d: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(d: usize, left: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == d {
            let mut v: Vec<f64> = cur.iter().map(|&x| x as f64 / m as f64).collect();
            v.push(left as f64 / m as f64);
            out.push(v);
            return;
        }
        for i in 0..=left {
            cur.push(i);
            rec(d, left - i, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, m, m, &mut Vec::new(), &mut out);
    out
}

impl SmoothPartition {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Kernel support radius `ρ = 3δ/4`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn kernel(&self) -> &'static str {
        "(1-(r/rho)^2)^3 on r < rho"
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Values `β` and reference gradients at node `q` of top simplex `t`,
    /// one entry per local vertex.
    pub fn node_values(&self, t: usize, q: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        self.nodes[t][q].clone()
    }

    /// Clamped coordinates `b̄` at barycentric point `b`, per local vertex.
    pub fn clamped(&self, b: &[f64]) -> Vec<f64> {
        b.iter().map(|&x| clamp(self.dim, x)).collect()
    }

    /// `β` and its reference gradients at barycentric point `b` of top
    /// simplex `t`, per local vertex.
    pub fn evaluate(&self, t: usize, b: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.dim;
        let mut val = vec![0.0; n + 1];
        let mut grad = vec![vec![0.0; n]; n + 1];
        for (a, &v) in self.tops[t].iter().enumerate() {
            let chart = &self.charts[v];
            let (x, e) = chart.embed(t, b);
            let mut s = 0.0;
            let mut g = DVector::zeros(n);
            for (off, w) in &self.ball {
                let r = off.norm();
                let bar = clamp(n, chart.coordinate(&(&x + off)));
                if bar == 0.0 {
                    continue;
                }
                s += w * eta(r / self.rho) * bar;
                if r > 0.0 {
                    // ∇_x η(|x − y|) with y = x + off
                    g.axpy(-w * eta_prime(r / self.rho, self.rho) * bar / r, off, 1.0);
                }
            }
            val[a] = s / self.kernel_mass;
            for (i, ei) in e.iter().enumerate() {
                grad[a][i] = ei.dot(&g) / self.kernel_mass;
            }
        }
        let total: f64 = val.iter().sum();
        let dtotal: Vec<f64> = (0..n).map(|i| grad.iter().map(|g| g[i]).sum()).collect();
        let beta: Vec<f64> = val.iter().map(|v| v / total).collect();
        let dbeta = (0..=n)
            .map(|a| {
                (0..n)
                    .map(|i| (grad[a][i] * total - val[a] * dtotal[i]) / (total * total))
                    .collect()
            })
            .collect();
        (beta, dbeta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::torus_mesh;

    #[test]
    fn partition_sums_to_one_and_is_sharp_at_vertices() {
        let t = torus_mesh(4, 2, 0.25).unwrap();
        let q = QuadratureRule::new(2, 4).unwrap();
        let p = smooth_partition(&t.complex, &t.metric, &q).unwrap();
        assert!(p.delta() > 0.0 && p.rho() < p.delta());
        for top in 0..t.complex.count(2) {
            for node in 0..q.len() {
                let (b, _) = p.node_values(top, node);
                assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(p.clamped(&q.nodes[node]).iter().sum::<f64>() >= 0.25 - 1e-12);
            }
        }
        let (b, _) = p.evaluate(0, &[0.0, 1.0, 0.0]);
        assert!((b[1] - 1.0).abs() < 1e-12 && b[0].abs() < 1e-12 && b[2].abs() < 1e-12);
    }

    #[test]
    fn curved_complexes_are_rejected() {
        let k = OrientedComplex::from_top_simplices(2, vec![0, 1, 2], &[vec![0, 1, 2]]).unwrap();
        let m = MetricData::new(Curvature::Hyperbolic, vec![1.0; 3]);
        let q = QuadratureRule::new(2, 2).unwrap();
        assert!(matches!(smooth_partition(&k, &m, &q), Err(Error::ChartUnavailable(_))));
    }
}
