//! Whitney forms, mass matrices, the Whitney Laplacian, Hodge
//! decomposition and the coexact spectral gap.

pub mod forms;
mod hodge;
mod smooth;
mod spectrum;

pub use hodge::HodgeParts;
pub use smooth::{smooth_partition, SmoothPartition};
pub use spectrum::{Eigenpair, SolverPath, Spectrum, DENSE_LIMIT};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::complex::{Cochain, OrientedComplex};
use crate::error::{Error, Result};
use crate::geometry::{barycentric_point, Curvature, MetricData, QuadratureRule};
use crate::linalg::{CsrMatrix, Skyline};
use forms::{
    barycentric_gradients, covector_gram, evaluate_on_vectors, face_masks, mask_positions,
    subsets, whitney_coefficients,
};

/// Relative singular value / eigenvalue threshold below which a value
/// counts as zero.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Barycentric coordinates of the straightened simplices.
    Standard,
    /// Clamped and mollified partition of unity (flat complexes only).
    Smoothed,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Mode::Standard),
            "smoothed" => Ok(Mode::Smoothed),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Standard => "standard",
            Mode::Smoothed => "smoothed",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WhitneyOptions {
    pub order: usize,
    pub mode: Mode,
    /// Largest number of unknowns solved with dense eigen/SVD routines.
    pub dense_limit: usize,
}

impl Default for WhitneyOptions {
    fn default() -> Self {
        Self { order: 4, mode: Mode::Standard, dense_limit: DENSE_LIMIT }
    }
}

/// Mass matrices of every degree together with the coboundaries.
#[derive(Clone, Debug)]
pub struct WhitneyStructure {
    dim: usize,
    options: WhitneyOptions,
    mass: Vec<CsrMatrix>,
    factors: Vec<Skyline>,
    coboundary: Vec<CsrMatrix>,
    volume: f64,
    betti: Vec<usize>,
    ranks: Vec<usize>,
    components: Vec<usize>,
}

/// Data at one quadrature node of a top simplex.
pub(crate) struct Node {
    /// Weight times the Riemannian volume density.
    pub dvol: f64,
    pub ginv: DMatrix<f64>,
    /// Partition values at the node, one per local vertex.
    pub b: Vec<f64>,
    /// Reference-coordinate gradients of the partition functions.
    pub grads: Vec<Vec<f64>>,
}

/// Quadrature rule used on top simplex `t` in standard mode.
pub(crate) fn rule_for(k: &OrientedComplex, metric: &MetricData, t: usize, order: usize) -> Result<QuadratureRule> {
    let n = k.dim();
    if metric.curvature == Curvature::Flat {
        return QuadratureRule::new(n, order);
    }
    let max_len = metric.simplex_lengths(k, t).into_iter().fold(0.0, f64::max);
    QuadratureRule::adapted(n, order, metric.curvature, max_len)
}

pub(crate) fn top_nodes(
    k: &OrientedComplex,
    metric: &MetricData,
    t: usize,
    order: usize,
    partition: Option<&SmoothPartition>,
) -> Result<Vec<Node>> {
    let n = k.dim();
    let s = metric.realize(k, t)?;
    let rule = match partition {
        Some(p) => p.rule().clone(),
        None => rule_for(k, metric, t, order)?,
    };
    let bary_grads = barycentric_gradients(n);
    let mut out = Vec::with_capacity(rule.len());
    for (q, (node, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let pd = barycentric_point(&s, node)?;
        let det = pd.metric.determinant();
        if !(det > 0.0) {
            return Err(Error::DegenerateSimplex(format!("top simplex {t}: pullback metric not positive")));
        }
        let ginv = pd
            .metric
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateSimplex(format!("top simplex {t}: singular metric")))?;
        let (b, grads) = match partition {
            Some(p) => p.node_values(t, q),
            None => (node.clone(), bary_grads.clone()),
        };
        out.push(Node { dvol: w * det.sqrt(), ginv, b, grads });
    }
    Ok(out)
}

/// Local mass matrix of degree `deg` on one top simplex, faces ordered as
/// [`face_masks`].
pub(crate) fn local_mass(n: usize, deg: usize, nodes: &[Node]) -> DMatrix<f64> {
    let faces: Vec<Vec<usize>> = face_masks(n, deg).into_iter().map(mask_positions).collect();
    let subs = subsets(n, deg);
    let nf = faces.len();
    let mut local = DMatrix::zeros(nf, nf);
    for node in nodes {
        let g = covector_gram(&node.ginv, &subs);
        let w: Vec<nalgebra::DVector<f64>> = faces
            .iter()
            .map(|f| nalgebra::DVector::from_vec(whitney_coefficients(n, f, &node.b, &node.grads, &subs)))
            .collect();
        let gw: Vec<nalgebra::DVector<f64>> = w.iter().map(|v| &g * v).collect();
        for a in 0..nf {
            for b in a..nf {
                let v = node.dvol * w[a].dot(&gw[b]);
                local[(a, b)] += v;
                if a != b {
                    local[(b, a)] += v;
                }
            }
        }
    }
    local
}

impl WhitneyStructure {
    pub fn assemble(k: &OrientedComplex, metric: &MetricData, options: WhitneyOptions) -> Result<Self> {
        let n = k.dim();
        metric.validate(k)?;
        let partition = match options.mode {
            Mode::Standard => None,
            Mode::Smoothed => Some(smooth_partition(k, metric, &QuadratureRule::new(n, options.order)?)?),
        };
        let ntop = k.count(n);
        let locals: Vec<(f64, Vec<DMatrix<f64>>)> = (0..ntop)
            .into_par_iter()
            .map(|t| {
                let nodes = top_nodes(k, metric, t, options.order, partition.as_ref())?;
                let vol = nodes.iter().map(|nd| nd.dvol).sum::<f64>();
                let mats = (0..=n).map(|deg| local_mass(n, deg, &nodes)).collect();
                Ok((vol, mats))
            })
            .collect::<Result<_>>()?;

        let mut mass = Vec::with_capacity(n + 1);
        for deg in 0..=n {
            let masks = face_masks(n, deg);
            let mut trip = Vec::new();
            for (t, (_, mats)) in locals.iter().enumerate() {
                let idx: Vec<usize> = masks.iter().map(|&m| k.face_by_mask(n, t, m).index).collect();
                let m = &mats[deg];
                for (a, &ga) in idx.iter().enumerate() {
                    for (b, &gb) in idx.iter().enumerate() {
                        trip.push((ga, gb, m[(a, b)]));
                    }
                }
            }
            mass.push(CsrMatrix::from_triplets(k.count(deg), k.count(deg), trip));
        }
        let volume = locals.iter().map(|l| l.0).sum();
        let factors = mass
            .iter()
            .enumerate()
            .map(|(deg, m)| {
                Skyline::factor(m).map_err(|e| Error::SingularMass(format!("degree {deg}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let coboundary = (0..n)
            .map(|deg| Ok(CsrMatrix::from_incidence(&k.coboundary_matrix(deg)?)))
            .collect::<Result<Vec<_>>>()?;
        let ranks = crate::complex::homology::boundary_ranks(k);
        let betti = (0..=n).map(|d| k.count(d) - ranks[d] - ranks[d + 1]).collect();
        let components = vertex_components(k);
        Ok(Self { dim: n, options, mass, factors, coboundary, volume, betti, ranks, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.options.order
    }

    pub fn mode(&self) -> Mode {
        self.options.mode
    }

    pub fn options(&self) -> &WhitneyOptions {
        &self.options
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn mass(&self, deg: usize) -> Result<&CsrMatrix> {
        self.mass.get(deg).ok_or(Error::DegreeOutOfRange { degree: deg, dim: self.dim })
    }

    /// `d_k : C^k → C^{k+1}`.
    pub fn coboundary(&self, deg: usize) -> Result<&CsrMatrix> {
        self.coboundary.get(deg).ok_or(Error::DegreeOutOfRange { degree: deg, dim: self.dim })
    }

    /// Betti numbers from exact boundary ranks.
    pub fn betti(&self) -> &[usize] {
        &self.betti
    }

    /// Exact ranks of `∂_k`, indexed by `k` (entries `0` and `n+1` are zero).
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Connected component of each vertex.
    pub(crate) fn components(&self) -> &[usize] {
        &self.components
    }

    pub fn count(&self, deg: usize) -> usize {
        self.mass[deg].nrows()
    }

    /// Whitney inner product `fᵀ M_k g`.
    pub fn inner(&self, deg: usize, f: &[f64], g: &[f64]) -> Result<f64> {
        let m = self.mass(deg)?;
        if f.len() != m.nrows() || g.len() != m.nrows() {
            return Err(Error::DegreeMismatch { expected: m.nrows(), got: f.len().max(g.len()) });
        }
        Ok(m.bilinear(f, g))
    }

    /// `M_k⁻¹ v`.
    pub fn mass_solve(&self, deg: usize, v: &[f64]) -> Result<Vec<f64>> {
        self.mass(deg)?;
        Ok(self.factors[deg].solve(v))
    }

    /// `d_k f`.
    pub fn apply_d(&self, deg: usize, f: &[f64]) -> Result<Vec<f64>> {
        Ok(self.coboundary(deg)?.mul_vec(f))
    }
}

fn vertex_components(k: &OrientedComplex) -> Vec<usize> {
    let nv = k.count(0);
    let mut comp = vec![usize::MAX; nv];
    let mut adj = vec![Vec::new(); nv];
    if k.dim() >= 1 {
        for e in k.simplices(1) {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
    }
    let mut c = 0;
    for s in 0..nv {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

/// Mass matrix of one degree.
pub fn mass_matrix(
    k: &OrientedComplex,
    metric: &MetricData,
    deg: usize,
    order: usize,
    mode: Mode,
) -> Result<CsrMatrix> {
    if deg > k.dim() {
        return Err(Error::DegreeOutOfRange { degree: deg, dim: k.dim() });
    }
    let w = WhitneyStructure::assemble(k, metric, WhitneyOptions { order, mode, ..Default::default() })?;
    Ok(w.mass[deg].clone())
}

/// Coefficients of `W(f)` at barycentric point `b` of top simplex `t`, on
/// the basis `dξ_I` of reference coordinates.
pub fn whitney_eval(k: &OrientedComplex, f: &Cochain, t: usize, b: &[f64]) -> Result<Vec<f64>> {
    let n = k.dim();
    if f.degree > n {
        return Err(Error::DegreeOutOfRange { degree: f.degree, dim: n });
    }
    if f.len() != k.count(f.degree) {
        return Err(Error::DegreeMismatch { expected: k.count(f.degree), got: f.len() });
    }
    if t >= k.count(n) || b.len() != n + 1 {
        return Err(Error::InvalidArgument("top simplex or coordinate length".into()));
    }
    let sum: f64 = b.iter().sum();
    if b.iter().any(|&x| x < -1e-12) || (sum - 1.0).abs() > 1e-10 {
        return Err(Error::PointNotInSimplex);
    }
    Ok(local_form(k, f, t, b, &barycentric_gradients(n)))
}

pub(crate) fn local_form(
    k: &OrientedComplex,
    f: &Cochain,
    t: usize,
    b: &[f64],
    grads: &[Vec<f64>],
) -> Vec<f64> {
    let n = k.dim();
    let subs = subsets(n, f.degree);
    let mut out = vec![0.0; subs.len()];
    for mask in face_masks(n, f.degree) {
        let c = f.coeffs[k.face_by_mask(n, t, mask).index];
        if c == 0.0 {
            continue;
        }
        let w = whitney_coefficients(n, &mask_positions(mask), b, grads, &subs);
        for (o, x) in out.iter_mut().zip(w) {
            *o += c * x;
        }
    }
    out
}

/// `∫_σ W(f)` over the `k`-simplex `σ = (f.degree, index)`, evaluated by
/// quadrature on the face inside one of its top cofaces.
pub fn face_integral(k: &OrientedComplex, f: &Cochain, index: usize) -> Result<f64> {
    let n = k.dim();
    let deg = f.degree;
    if deg > n {
        return Err(Error::DegreeOutOfRange { degree: deg, dim: n });
    }
    let t = *k
        .top_cofaces(deg, index)
        .first()
        .ok_or_else(|| Error::InvalidArgument("simplex has no top coface".into()))?;
    let mask = face_masks(n, deg)
        .into_iter()
        .find(|&m| k.face_by_mask(n, t, m).index == index)
        .expect("face of its top coface");
    let pos = mask_positions(mask);
    let subs = subsets(n, deg);
    let grads = barycentric_gradients(n);
    let embed = |p: usize| -> Vec<f64> {
        let mut v = vec![0.0; n];
        if p > 0 {
            v[p - 1] = 1.0;
        }
        v
    };
    let tangents: Vec<Vec<f64>> = pos[1..]
        .iter()
        .map(|&p| {
            let (a, b) = (embed(p), embed(pos[0]));
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        })
        .collect();
    if deg == 0 {
        let mut b = vec![0.0; n + 1];
        b[pos[0]] = 1.0;
        return Ok(local_form(k, f, t, &b, &grads)[0]);
    }
    let rule = QuadratureRule::new(deg, 2)?;
    let mut total = 0.0;
    for (node, w) in rule.nodes.iter().zip(&rule.weights) {
        let mut b = vec![0.0; n + 1];
        for (j, &p) in pos.iter().enumerate() {
            b[p] = node[j];
        }
        let form = local_form(k, f, t, &b, &grads);
        total += w * evaluate_on_vectors(&form, &tangents, &subs);
    }
    Ok(total)
}

/// Pointwise covector norm `|W(f)|_g` at one node.
pub(crate) fn pointwise_norm(coeffs: &[f64], ginv: &DMatrix<f64>, deg: usize, n: usize) -> f64 {
    let g = covector_gram(ginv, &subsets(n, deg));
    let v = nalgebra::DVector::from_column_slice(coeffs);
    (v.dot(&(&g * &v))).max(0.0).sqrt()
}

/// Largest pointwise norm of `W(f)` over the quadrature nodes of every top
/// simplex, with the number of nodes sampled.
pub fn whitney_linf(
    k: &OrientedComplex,
    metric: &MetricData,
    f: &Cochain,
    order: usize,
) -> Result<(f64, usize)> {
    let n = k.dim();
    if f.degree > n || f.len() != k.count(f.degree) {
        return Err(Error::DegreeMismatch { expected: k.count(f.degree.min(n)), got: f.len() });
    }
    let per_top: Vec<(f64, usize)> = (0..k.count(n))
        .into_par_iter()
        .map(|t| {
            let nodes = top_nodes(k, metric, t, order, None)?;
            let rule = rule_for(k, metric, t, order)?;
            let mut best = 0.0f64;
            for (node, nd) in rule.nodes.iter().zip(&nodes) {
                let form = local_form(k, f, t, node, &nd.grads);
                best = best.max(pointwise_norm(&form, &nd.ginv, f.degree, n));
            }
            Ok((best, nodes.len()))
        })
        .collect::<Result<_>>()?;
    Ok(per_top.iter().fold((0.0, 0), |(m, c), &(b, l)| (m.max(b), c + l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::torus_mesh;

    fn right_triangle() -> (OrientedComplex, MetricData) {
        let k = OrientedComplex::from_top_simplices(2, vec![0, 1, 2], &[vec![0, 1, 2]]).unwrap();
        let m = MetricData::new(Curvature::Flat, vec![1.0, 1.0, 2f64.sqrt()]);
        (k, m)
    }

    #[test]
    fn vertex_mass_of_right_triangle() {
        let (k, m) = right_triangle();
        let m0 = mass_matrix(&k, &m, 0, 4, Mode::Standard).unwrap().to_dense();
        let area = 0.5;
        for i in 0..3 {
            for j in 0..3 {
                let want = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((m0[(i, j)] - want).abs() < 1e-15);
            }
        }
        let m2 = mass_matrix(&k, &m, 2, 4, Mode::Standard).unwrap();
        assert!((m2.get(0, 0) - 1.0 / area).abs() < 1e-13);
    }

    #[test]
    fn whitney_forms_integrate_to_one() {
        let (k, _) = right_triangle();
        for deg in 0..=2 {
            for i in 0..k.count(deg) {
                let f = Cochain::basis(deg, k.count(deg), i);
                assert!((face_integral(&k, &f, i).unwrap() - 1.0).abs() < 1e-14);
                for j in (0..k.count(deg)).filter(|&j| j != i) {
                    assert!(face_integral(&k, &f, j).unwrap().abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn zero_form_is_barycentric() {
        let (k, _) = right_triangle();
        let f = Cochain::basis(0, 3, 1);
        let v = whitney_eval(&k, &f, 0, &[0.2, 0.3, 0.5]).unwrap();
        assert!((v[0] - 0.3).abs() < 1e-15);
        assert!(matches!(whitney_eval(&k, &f, 0, &[1.2, -0.2, 0.0]), Err(Error::PointNotInSimplex)));
    }

    #[test]
    fn torus_mass_matrices_are_spd() {
        let t = torus_mesh(4, 2, 0.25).unwrap();
        let w = WhitneyStructure::assemble(&t.complex, &t.metric, WhitneyOptions::default()).unwrap();
        assert!((w.volume() - 1.0).abs() < 1e-13);
        for deg in 0..=2 {
            assert!(w.mass(deg).unwrap().asymmetry() < 1e-14);
        }
    }
}
