use nalgebra::DVector;

use super::realize::model_distance;
use super::{Curvature, MetricData};
use crate::complex::OrientedComplex;
use crate::error::{Error, Result};

/// `Ψ(1) = 2·3^121.5·5^−81`, evaluated through logarithms.
pub fn psi_one() -> f64 {
    (2f64.ln() + 121.5 * 3f64.ln() - 81.0 * 5f64.ln()).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetParameters {
    pub mu: f64,
    pub eps: f64,
}

impl NetParameters {
    pub fn new(mu: f64, eps: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::InvalidArgument(format!("μ = {mu} must lie in (0, 1]")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("ε = {eps} must be positive")));
        }
        Ok(Self { mu, eps })
    }

    /// `ε₀ = min{ε/10, Ψ(1)}`.
    pub fn eps0(&self) -> f64 {
        (self.eps / 10.0).min(psi_one())
    }

    /// Admissible edge interval `[2ε₀/5, 2ε₀]`.
    pub fn edge_interval(&self) -> (f64, f64) {
        let e0 = self.eps0();
        (2.0 * e0 / 5.0, 2.0 * e0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GEpsReport {
    pub psi_one: f64,
    pub eps0: f64,
    pub interval: (f64, f64),
    /// Edges outside the interval with their lengths.
    pub violations: Vec<(usize, f64)>,
    pub pass: bool,
    /// The embedding condition on vertex stars has no finite certificate
    /// from edge lengths and is never checked.
    pub deep_embedding_checked: bool,
}

/// Lists edges whose length falls outside `[2ε₀/5, 2ε₀]`.
pub fn check_g_eps(k: &OrientedComplex, m: &MetricData, eps: f64) -> Result<GEpsReport> {
    let p = NetParameters::new(1.0, eps)?;
    let (lo, hi) = p.edge_interval();
    let violations: Vec<(usize, f64)> = (0..k.count(1))
        .filter_map(|e| {
            let l = m.lengths[e];
            (l < lo || l > hi).then_some((e, l))
        })
        .collect();
    Ok(GEpsReport {
        psi_one: psi_one(),
        eps0: p.eps0(),
        interval: (lo, hi),
        pass: violations.is_empty(),
        violations,
        deep_embedding_checked: false,
    })
}

/// Coordinates in which distances between points are measured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chart {
    Euclidean,
    /// Flat torus `ℝᵈ / (side·ℤ)ᵈ`.
    FlatTorus { side: f64 },
    Hyperboloid,
    Sphere,
}

impl Chart {
    pub fn distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        match *self {
            Chart::Euclidean => model_distance(Curvature::Flat, a, b),
            Chart::FlatTorus { side } => a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| {
                    let d = (x - y).rem_euclid(side);
                    let d = d.min(side - d);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            Chart::Hyperboloid => model_distance(Curvature::Hyperbolic, a, b),
            Chart::Sphere => model_distance(Curvature::Spherical, a, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetReport {
    pub dense: bool,
    pub separated: bool,
    /// Largest probe-to-net distance.
    pub covering_radius: f64,
    /// Smallest pairwise distance (infinite for a single point).
    pub min_separation: f64,
}

/// `separated` iff all pairwise distances are at least `με`; `dense` iff
/// every probe lies within `ε` of some point.
pub fn net_predicates(
    chart: Chart,
    points: &[DVector<f64>],
    probes: &[DVector<f64>],
    p: NetParameters,
) -> Result<NetReport> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            min_sep = min_sep.min(chart.distance(&points[i], &points[j]));
        }
    }
    let covering = probes
        .iter()
        .map(|q| points.iter().map(|x| chart.distance(q, x)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(NetReport {
        dense: covering <= p.eps,
        separated: min_sep >= p.mu * p.eps,
        covering_radius: covering,
        min_separation: min_sep,
    })
}
