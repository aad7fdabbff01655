use nalgebra::{DMatrix, SymmetricEigen};

use super::Curvature;
use crate::error::{Error, Result};

/// Collapsed Gauss–Jacobi rule on the reference `n`-simplex
/// `{ξ ≥ 0, Σξ ≤ 1}`.
///
/// Built as a conical product: `m = ⌊order/2⌋ + 1` Gauss–Jacobi points per
/// collapsed direction integrate every polynomial of total degree
/// `≤ order` exactly. Weights are positive and sum to `1/n!`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub order: usize,
    /// Barycentric coordinates `(b_0, …, b_n)` of each node.
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub const MAX_ORDER: usize = 8;
const MAX_REFINE: usize = 64;

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for i in 0..d {
            let mut q = p.clone();
            q.insert(i, d - 1);
            out.push(q);
        }
    }
    out
}

/// Gauss–Jacobi nodes and weights on `[0,1]` for the weight `(1−u)^α`,
/// weights normalized to `1/(α+1)`.
fn gauss_jacobi01(m: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let beta = 0.0;
    let ab = alpha + beta;
    let mut j = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        j[(k, k)] = diag;
        if k + 1 < m {
            let k1 = kf + 1.0;
            let num = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
            let s = 2.0 * k1 + ab;
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = (num / den).sqrt();
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mass = 1.0 / (alpha + 1.0);
    let nodes = pairs.iter().map(|p| p.0).collect();
    let weights = pairs.iter().map(|p| p.1 / total * mass).collect();
    (nodes, weights)
}

/// Gauss–Legendre nodes and weights on `[0,1]`.
pub(crate) fn gauss_legendre01(m: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi01(m, 0.0)
}

impl QuadratureRule {
    /// Rule on the reference `dim`-simplex exact to total degree `order`.
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "quadrature order {order} exceeds {MAX_ORDER}"
            )));
        }
        if dim == 0 {
            return Ok(Self { dim, order, nodes: vec![vec![1.0]], weights: vec![1.0] });
        }
        let m = order / 2 + 1;
        let rules: Vec<(Vec<f64>, Vec<f64>)> =
            (1..=dim).map(|i| gauss_jacobi01(m, (dim - i) as f64)).collect();
        let mut nodes = Vec::with_capacity(m.pow(dim as u32));
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut idx = vec![0usize; dim];
        loop {
            // ξ_1 = u_1, ξ_i = (1−u_1)…(1−u_{i−1}) u_i
            let mut rest = 1.0;
            let mut w = 1.0;
            let mut xi = Vec::with_capacity(dim);
            for (d, &i) in idx.iter().enumerate() {
                let u = rules[d].0[i];
                xi.push(rest * u);
                rest *= 1.0 - u;
                w *= rules[d].1[i];
            }
            let mut b = Vec::with_capacity(dim + 1);
            b.push(rest.max(0.0));
            b.extend(xi);
            nodes.push(b);
            weights.push(w);
            let mut d = dim;
            loop {
                if d == 0 {
                    return Ok(Self { dim, order, nodes, weights });
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < m {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// Composite rule: the reference simplex is cut into `m^dim` congruent
    /// pieces (Freudenthal subdivision of the order simplex
    /// `0 ≤ y_1 ≤ … ≤ y_dim ≤ 1`, `y_i = ξ_1 + … + ξ_i`) and the base rule is
    /// applied on each.
    pub fn composite(dim: usize, order: usize, m: usize) -> Result<Self> {
        let base = Self::new(dim, order)?;
        if m <= 1 || dim == 0 {
            return Ok(base);
        }
        let perms = permutations(dim);
        let scale = (m as f64).powi(dim as i32);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut cell = vec![0usize; dim];
        loop {
            for perm in &perms {
                // vertices of the Kuhn simplex in y-coordinates, scaled by m
                let mut verts: Vec<Vec<usize>> = vec![cell.clone()];
                let mut p = cell.clone();
                for &axis in perm {
                    p[axis] += 1;
                    verts.push(p.clone());
                }
                let bary: Vec<f64> = (0..dim)
                    .map(|i| verts.iter().map(|v| v[i] as f64).sum::<f64>())
                    .collect();
                if bary.windows(2).all(|w| w[0] < w[1]) {
                    // ξ-coordinates of the small simplex vertices
                    let xi: Vec<Vec<f64>> = verts
                        .iter()
                        .map(|v| {
                            (0..dim)
                                .map(|i| (v[i] as f64 - if i == 0 { 0.0 } else { v[i - 1] as f64 }) / m as f64)
                                .collect()
                        })
                        .collect();
                    for (b, w) in base.nodes.iter().zip(&base.weights) {
                        let mut x = vec![0.0; dim];
                        for (lam, v) in b.iter().zip(&xi) {
                            for i in 0..dim {
                                x[i] += lam * v[i];
                            }
                        }
                        let mut node = Vec::with_capacity(dim + 1);
                        node.push((1.0 - x.iter().sum::<f64>()).max(0.0));
                        node.extend(x);
                        nodes.push(node);
                        weights.push(w / scale);
                    }
                }
            }
            let mut d = 0;
            loop {
                if d == dim {
                    debug_assert_eq!(nodes.len(), base.len() * m.pow(dim as u32));
                    return Ok(Self { dim, order, nodes, weights });
                }
                cell[d] += 1;
                if cell[d] < m {
                    break;
                }
                cell[d] = 0;
                d += 1;
            }
        }
    }

    /// Rule of the requested order, refined for curved simplices so that
    /// pieces have edges of at most a calibrated size for that order.
    pub fn adapted(dim: usize, order: usize, curvature: Curvature, max_len: f64) -> Result<Self> {
        if curvature == Curvature::Flat {
            return Self::new(dim, order);
        }
        let h = match order {
            0 | 1 => 0.002,
            2 | 3 => 0.02,
            4 | 5 => 0.1,
            6 | 7 => 0.2,
            _ => 0.3,
        };
        let m = ((max_len / h).ceil() as usize).clamp(1, MAX_REFINE);
        Self::composite(dim, order, m)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Reference coordinates `ξ = (b_1, …, b_n)` of node `q`.
    pub fn xi(&self, q: usize) -> &[f64] {
        &self.nodes[q][1..]
    }
}
