use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{Curvature, QuadratureRule};
use crate::error::{Error, Result};

/// A simplex placed in its model space.
///
/// Flat simplices live in `ℝⁿ`; curved ones in `ℝ^{n+1}` with the last
/// coordinate distinguished (time-like on the hyperboloid, the pole on the
/// sphere). Vertex 0 sits at the basepoint `(0, …, 0, 1)`.
#[derive(Clone, Debug)]
pub struct RealizedSimplex {
    pub curvature: Curvature,
    pub dim: usize,
    pub vertices: Vec<DVector<f64>>,
    /// Cosines of the angles at vertex 0 between edges `0i` and `0j`.
    pub angle_gram: DMatrix<f64>,
}

/// Point of a straightened simplex together with the pullback metric in the
/// reference coordinates `ξ = (b_1, …, b_n)`.
#[derive(Clone, Debug)]
pub struct PointData {
    pub point: DVector<f64>,
    pub metric: DMatrix<f64>,
}

fn ambient_dot(c: Curvature, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    match c {
        Curvature::Hyperbolic => {
            let n = a.len() - 1;
            a.rows(0, n).dot(&b.rows(0, n)) - a[n] * b[n]
        }
        _ => a.dot(b),
    }
}

impl RealizedSimplex {
    /// Model distance between two points of the chart.
    pub fn distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        model_distance(self.curvature, a, b)
    }
}

pub(crate) fn model_distance(c: Curvature, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    match c {
        Curvature::Flat => (a - b).norm(),
        Curvature::Hyperbolic => {
            // arccosh(−⟨a,b⟩) loses accuracy near 0; use the chord instead
            let d = a - b;
            let chord2 = ambient_dot(c, &d, &d).max(0.0);
            2.0 * (chord2.sqrt() / 2.0).asinh()
        }
        Curvature::Spherical => 2.0 * ((a - b).norm() / 2.0).min(1.0).asin(),
    }
}

fn cos_angle(c: Curvature, a: f64, b: f64, opp: f64) -> f64 {
    match c {
        Curvature::Flat => (a * a + b * b - opp * opp) / (2.0 * a * b),
        Curvature::Hyperbolic => (a.cosh() * b.cosh() - opp.cosh()) / (a.sinh() * b.sinh()),
        Curvature::Spherical => (opp.cos() - a.cos() * b.cos()) / (a.sin() * b.sin()),
    }
}

/// Places an `n`-simplex with the given edge lengths (local order `(0,1),
/// (0,2), …, (1,2), …`) in the model space of curvature `c`.
///
/// The angle Gram matrix at vertex 0 comes from the law of cosines; its
/// Cholesky factor gives the unit edge directions in a canonical frame.
pub fn realize_simplex(n: usize, lengths: &[f64], c: Curvature) -> Result<RealizedSimplex> {
    if lengths.len() != n * (n + 1) / 2 {
        return Err(Error::InvalidArgument(format!(
            "{} lengths for a {n}-simplex",
            lengths.len()
        )));
    }
    if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::MetricUnrealizable("edge lengths must be positive".into()));
    }
    if c == Curvature::Spherical && lengths.iter().any(|&l| l >= std::f64::consts::PI) {
        return Err(Error::MetricUnrealizable("spherical edge length must be below π".into()));
    }
    let idx = |a: usize, b: usize| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        // position of (a,b) in the lexicographic pair list
        a * (2 * n + 1 - a) / 2 + (b - a - 1)
    };
    let len = |a: usize, b: usize| lengths[idx(a, b)];
    let mut g = DMatrix::<f64>::identity(n, n);
    for i in 1..=n {
        for j in i + 1..=n {
            let v = cos_angle(c, len(0, i), len(0, j), len(i, j));
            g[(i - 1, j - 1)] = v;
            g[(j - 1, i - 1)] = v;
        }
    }
    // triangle-type inequalities at vertex 0 are necessary but the full
    // condition is positivity of the angle Gram matrix
    let eig = SymmetricEigen::new(g.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if g.iter().any(|x| !x.is_finite()) || min < -1e-12 {
        return Err(Error::MetricUnrealizable(format!(
            "angle Gram matrix has eigenvalue {min:.3e}"
        )));
    }
    let det: f64 = eig.eigenvalues.iter().product();
    if det < 1e-12 {
        return Err(Error::DegenerateSimplex(format!("angle Gram determinant {det:.3e}")));
    }
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DegenerateSimplex("angle Gram matrix is singular".into()))?;
    let l = chol.l();
    let amb = if c == Curvature::Flat { n } else { n + 1 };
    let mut vertices = Vec::with_capacity(n + 1);
    let mut base = DVector::zeros(amb);
    if c != Curvature::Flat {
        base[n] = 1.0;
    }
    vertices.push(base);
    for i in 1..=n {
        let u = l.row(i - 1).transpose();
        let r = len(0, i);
        let mut p = DVector::zeros(amb);
        let (radial, height) = match c {
            Curvature::Flat => (r, 0.0),
            Curvature::Hyperbolic => (r.sinh(), r.cosh()),
            Curvature::Spherical => (r.sin(), r.cos()),
        };
        for k in 0..n {
            p[k] = radial * u[k];
        }
        if c != Curvature::Flat {
            p[n] = height;
        }
        vertices.push(p);
    }
    Ok(RealizedSimplex { curvature: c, dim: n, vertices, angle_gram: g })
}

/// Point with barycentric coordinates `b` on the straightened simplex and
/// the pullback metric in reference coordinates.
///
/// With `y = Σ b_a p_a`, `E_i = p_i − p_0` and `ρ² = κ⟨y,y⟩` the curved case
/// gives `g_ij = (⟨E_i,E_j⟩ − κ⟨y,E_i⟩⟨y,E_j⟩/ρ²)/ρ²`.
pub fn barycentric_point(s: &RealizedSimplex, b: &[f64]) -> Result<PointData> {
    let n = s.dim;
    if b.len() != n + 1 {
        return Err(Error::InvalidArgument("barycentric coordinate length".into()));
    }
    let sum: f64 = b.iter().sum();
    if b.iter().any(|&x| x < -1e-12) || (sum - 1.0).abs() > 1e-10 {
        return Err(Error::PointNotInSimplex);
    }
    let amb = s.vertices[0].len();
    let mut y = DVector::zeros(amb);
    for (a, p) in s.vertices.iter().enumerate() {
        y.axpy(b[a], p, 1.0);
    }
    let e: Vec<DVector<f64>> = (1..=n).map(|i| &s.vertices[i] - &s.vertices[0]).collect();
    let c = s.curvature;
    let mut g = DMatrix::zeros(n, n);
    let point = match c {
        Curvature::Flat => {
            for i in 0..n {
                for j in i..n {
                    let v = e[i].dot(&e[j]);
                    g[(i, j)] = v;
                    g[(j, i)] = v;
                }
            }
            y
        }
        _ => {
            let kappa = c.kappa();
            let rho2 = kappa * ambient_dot(c, &y, &y);
            if rho2 <= 0.0 {
                return Err(Error::DegenerateSimplex("straightening leaves the model".into()));
            }
            let ye: Vec<f64> = e.iter().map(|v| ambient_dot(c, &y, v)).collect();
            for i in 0..n {
                for j in i..n {
                    let v = (ambient_dot(c, &e[i], &e[j]) - kappa * ye[i] * ye[j] / rho2) / rho2;
                    g[(i, j)] = v;
                    g[(j, i)] = v;
                }
            }
            y / rho2.sqrt()
        }
    };
    Ok(PointData { point, metric: g })
}

/// Riemannian volume by quadrature of `√det g`.
pub fn simplex_volume(s: &RealizedSimplex, q: &QuadratureRule) -> Result<f64> {
    if q.dim != s.dim {
        return Err(Error::InvalidArgument("quadrature dimension mismatch".into()));
    }
    let mut v = 0.0;
    for (node, w) in q.nodes.iter().zip(&q.weights) {
        let pd = barycentric_point(s, node)?;
        let det = pd.metric.determinant();
        if det <= 0.0 {
            return Err(Error::DegenerateSimplex("pullback metric is not positive".into()));
        }
        v += w * det.sqrt();
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_equilateral_triangle() {
        let s = realize_simplex(2, &[1.0, 1.0, 1.0], Curvature::Flat).unwrap();
        let p = &s.vertices;
        assert!((&p[1] - DVector::from_vec(vec![1.0, 0.0])).norm() < 1e-14);
        assert!((&p[2] - DVector::from_vec(vec![0.5, 3f64.sqrt() / 2.0])).norm() < 1e-14);
    }

    #[test]
    fn hyperbolic_pair_distance() {
        let l = 0.7;
        let s = realize_simplex(1, &[l], Curvature::Hyperbolic).unwrap();
        let d = ambient_dot(Curvature::Hyperbolic, &s.vertices[0], &s.vertices[1]);
        assert!((d + l.cosh()).abs() < 1e-14);
        for v in &s.vertices {
            assert!((ambient_dot(Curvature::Hyperbolic, v, v) + 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn unrealizable_lengths() {
        for c in [Curvature::Flat, Curvature::Hyperbolic, Curvature::Spherical] {
            assert!(matches!(
                realize_simplex(2, &[1.0, 3.0, 1.0], c),
                Err(Error::MetricUnrealizable(_))
            ));
        }
    }

    #[test]
    fn degenerate_flat_triangle() {
        assert!(matches!(
            realize_simplex(2, &[1.0, 2.0, 1.0], Curvature::Flat),
            Err(Error::DegenerateSimplex(_)) | Err(Error::MetricUnrealizable(_))
        ));
    }

    #[test]
    fn vertices_and_flat_metric() {
        let s = realize_simplex(2, &[1.0, 1.2, 0.9], Curvature::Hyperbolic).unwrap();
        for i in 0..3 {
            let mut b = vec![0.0; 3];
            b[i] = 1.0;
            let pd = barycentric_point(&s, &b).unwrap();
            assert!((pd.point - &s.vertices[i]).norm() < 1e-13);
        }
        let f = realize_simplex(2, &[1.0, 1.2, 0.9], Curvature::Flat).unwrap();
        let g1 = barycentric_point(&f, &[0.2, 0.3, 0.5]).unwrap().metric;
        let g2 = barycentric_point(&f, &[0.6, 0.1, 0.3]).unwrap().metric;
        assert_eq!(g1, g2);
    }

    #[test]
    fn flat_right_triangle_area() {
        let s = realize_simplex(2, &[1.0, 1.0, 2f64.sqrt()], Curvature::Flat).unwrap();
        let q = QuadratureRule::new(2, 0).unwrap();
        assert!((simplex_volume(&s, &q).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn outside_point_rejected() {
        let s = realize_simplex(2, &[1.0, 1.0, 1.0], Curvature::Flat).unwrap();
        assert!(matches!(barycentric_point(&s, &[1.5, -0.5, 0.0]), Err(Error::PointNotInSimplex)));
    }
}
