//! Constant-curvature geometry of simplices: realization, straightened
//! barycentric coordinates, quadrature and the net / edge-length checks.

mod net;
mod quadrature;
mod realize;
mod torus;

pub use net::{check_g_eps, net_predicates, psi_one, Chart, GEpsReport, NetParameters, NetReport};
pub use quadrature::QuadratureRule;
pub(crate) use quadrature::gauss_legendre01;
pub use realize::{barycentric_point, realize_simplex, simplex_volume, PointData, RealizedSimplex};
pub use torus::{torus_mesh, TorusMesh};

use crate::complex::OrientedComplex;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Curvature {
    Hyperbolic,
    Flat,
    Spherical,
}

impl Curvature {
    pub fn from_sign(k: i32) -> Option<Self> {
        match k {
            -1 => Some(Curvature::Hyperbolic),
            0 => Some(Curvature::Flat),
            1 => Some(Curvature::Spherical),
            _ => None,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Curvature::Hyperbolic => -1,
            Curvature::Flat => 0,
            Curvature::Spherical => 1,
        }
    }

    pub fn kappa(self) -> f64 {
        self.sign() as f64
    }
}

/// Curvature and one length per edge, indexed like the edges of the complex.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricData {
    pub curvature: Curvature,
    pub lengths: Vec<f64>,
}

impl MetricData {
    pub fn new(curvature: Curvature, lengths: Vec<f64>) -> Self {
        Self { curvature, lengths }
    }

    /// Edge lengths of top simplex `t` in local order `(0,1), (0,2), …,
    /// (1,2), …`.
    pub fn simplex_lengths(&self, k: &OrientedComplex, t: usize) -> Vec<f64> {
        let n = k.dim();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..=n {
            for b in a + 1..=n {
                out.push(self.lengths[k.local_edge(t, a, b)]);
            }
        }
        out
    }

    pub fn realize(&self, k: &OrientedComplex, t: usize) -> Result<RealizedSimplex> {
        realize_simplex(k.dim(), &self.simplex_lengths(k, t), self.curvature)
    }

    /// Checks lengths are positive and every top simplex is realizable.
    pub fn validate(&self, k: &OrientedComplex) -> Result<()> {
        if self.lengths.len() != k.count(1) {
            return Err(Error::InvalidArgument(format!(
                "{} lengths for {} edges",
                self.lengths.len(),
                k.count(1)
            )));
        }
        if let Some(e) = self.lengths.iter().position(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::MetricUnrealizable(format!("edge {e} has non-positive length")));
        }
        for t in 0..k.count(k.dim()) {
            self.realize(k, t).map_err(|e| match e {
                Error::MetricUnrealizable(m) => Error::MetricUnrealizable(format!("simplex {t}: {m}")),
                Error::DegenerateSimplex(m) => Error::DegenerateSimplex(format!("simplex {t}: {m}")),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Multiplies every length by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            curvature: self.curvature,
            lengths: self.lengths.iter().map(|l| l * c).collect(),
        }
    }
}
