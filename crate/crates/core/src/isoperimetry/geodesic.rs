use std::collections::VecDeque;

use num_integer::Integer;

use super::loops::rationalize;
use crate::complex::dual::DualComplex;
use crate::complex::Chain;
use crate::error::{Error, Result};
use crate::geometry::{Curvature, TorusMesh};
use crate::norms::gromov_norm;

/// Samples per lattice spacing when following a segment.
const SAMPLES_PER_SPACING: f64 = 64.0;

/// A straight closed geodesic on a flat torus: direction, start point and
/// total length (a whole number of periods).
#[derive(Clone, Debug, PartialEq)]
pub struct Geodesic {
    pub slope: Vec<f64>,
    pub basepoint: Vec<f64>,
    pub length: f64,
}

/// Edge path in the 1-skeleton of `K*`. Dual vertices are indexed by top
/// simplices and dual edges by codimension-one simplices.
#[derive(Clone, Debug)]
pub struct CellularPath {
    /// Visited dual vertices, closed (first equals last).
    pub tops: Vec<usize>,
    pub edges: Vec<(usize, i8)>,
    pub chain: Chain,
    /// Number of dual `n`-cells (vertex stars) met by the traced curve.
    pub cells_crossed: usize,
    /// Euclidean length of the traced curve.
    pub length: f64,
    pub descriptor: String,
    /// Homology class in lattice periods, read off by integrating the flat
    /// harmonic forms `dx_i` along the path.
    pub class: Vec<i64>,
}

impl CellularPath {
    /// Word length `len(c)`.
    pub fn word_length(&self) -> usize {
        self.edges.len()
    }

    pub fn gromov_norm(&self) -> f64 {
        gromov_norm(&self.chain.coeffs)
    }

    /// Measured `J = v / |γ|`.
    pub fn j_ratio(&self) -> f64 {
        self.cells_crossed as f64 / self.length
    }

    /// Measured `L = len(c) / |γ|`.
    pub fn l_ratio(&self) -> f64 {
        self.word_length() as f64 / self.length
    }
}

fn check_torus(t: &TorusMesh, d: &DualComplex) -> Result<()> {
    if t.metric.curvature != Curvature::Flat {
        return Err(Error::InvalidArgument("geodesic tracing needs a flat torus".into()));
    }
    if d.dim() != t.d || d.count(0) != t.complex.count(t.d) {
        return Err(Error::InvalidArgument("dual complex does not belong to this torus".into()));
    }
    Ok(())
}

/// Primitive integer direction of a rational slope.
fn integer_direction(slope: &[f64]) -> Result<Vec<i64>> {
    let big = slope.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(big > 0.0) || !big.is_finite() {
        return Err(Error::DegenerateGeodesic("zero or non-finite direction".into()));
    }
    let fr: Vec<(i64, i64)> = slope
        .iter()
        .map(|v| rationalize(v / big).ok_or_else(|| Error::IrrationalSlope(format!("{slope:?}"))))
        .collect::<Result<_>>()?;
    let den = fr.iter().fold(1i64, |l, f| l.lcm(&f.1));
    let p: Vec<i64> = fr.iter().map(|&(a, b)| a * (den / b)).collect();
    let g = p.iter().fold(0i64, |g, v| g.gcd(v));
    Ok(p.iter().map(|v| v / g).collect())
}

/// Traces a closed straight geodesic and routes a dual edge path along it.
pub fn geodesic_to_cellular(t: &TorusMesh, d: &DualComplex, g: &Geodesic) -> Result<CellularPath> {
    check_torus(t, d)?;
    if g.slope.len() != t.d || g.basepoint.len() != t.d {
        return Err(Error::InvalidArgument(format!("geodesic data must have {} components", t.d)));
    }
    if !(g.length > 0.0) || !g.length.is_finite() {
        return Err(Error::DegenerateGeodesic(format!("length {}", g.length)));
    }
    let p = integer_direction(&g.slope)?;
    let period = t.side() * p.iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
    let wraps = g.length / period;
    if (wraps - wraps.round()).abs() > 1e-9 * wraps.max(1.0) || wraps.round() < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "length {} is not a whole number of periods ({period})",
            g.length
        )));
    }
    let k = wraps.round();
    let end: Vec<f64> =
        g.basepoint.iter().zip(&p).map(|(x, v)| x + k * t.side() * *v as f64).collect();
    let desc = format!(
        "geodesic direction {:?} base {:?} periods {}",
        p, g.basepoint, k as u64
    );
    trace(t, d, &[g.basepoint.clone(), end], desc)
}

/// Traces the closed polygon through `corners` (the last corner joins back
/// to the first) in the universal cover.
pub fn trace_polygon(t: &TorusMesh, d: &DualComplex, corners: &[Vec<f64>]) -> Result<CellularPath> {
    check_torus(t, d)?;
    if corners.len() < 2 || corners.iter().any(|c| c.len() != t.d) {
        return Err(Error::InvalidArgument("polygon needs at least two corners of the torus dimension".into()));
    }
    let mut pts = corners.to_vec();
    pts.push(corners[0].clone());
    trace(t, d, &pts, format!("polygon {corners:?}"))
}

/// Corners of an axis-parallel rectangle with sides `a` along axis `i` and
/// `b` along axis `j`, starting at `origin`.
pub fn rectangle(origin: &[f64], i: usize, j: usize, a: f64, b: f64) -> Vec<Vec<f64>> {
    let mut c = vec![origin.to_vec(); 4];
    c[1][i] += a;
    c[2][i] += a;
    c[2][j] += b;
    c[3][j] += b;
    c
}

struct Tracer<'a> {
    t: &'a TorusMesh,
    /// Per top, its codimension-one faces.
    adjacency: Vec<Vec<(usize, usize)>>,
    d1: crate::complex::IncidenceMatrix,
}

impl<'a> Tracer<'a> {
    fn new(t: &'a TorusMesh, d: &'a DualComplex) -> Result<Self> {
        let n = t.d;
        let k = &t.complex;
        let mut adjacency = vec![Vec::new(); k.count(n)];
        for f in 0..k.count(n - 1) {
            let cf = k.cofaces(n - 1, f);
            if cf.len() == 2 {
                adjacency[cf[0]].push((cf[1], f));
                adjacency[cf[1]].push((cf[0], f));
            }
        }
        Ok(Tracer { t, adjacency, d1: d.boundary_matrix(1)? })
    }

    fn sign(&self, f: usize, to: usize) -> i8 {
        let c = self.d1.column(f).iter().find(|x| x.0 == to).map(|x| x.1).unwrap_or(0);
        if c > 0 {
            1
        } else {
            -1
        }
    }

    fn shared(&self, a: usize, b: usize) -> Vec<usize> {
        self.adjacency[a].iter().filter(|x| x.0 == b).map(|x| x.1).collect()
    }

    /// Dual edges from `ta` (at `xa`) to `tb` (at `xb`).
    fn connect(&self, xa: &[f64], ta: usize, xb: &[f64], tb: usize, depth: usize, out: &mut Vec<(usize, usize)>) {
        if ta == tb {
            return;
        }
        let shared = self.shared(ta, tb);
        if shared.len() == 1 {
            out.push((shared[0], tb));
            return;
        }
        let gap: f64 = xa.iter().zip(xb).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        if depth > 60 || gap < 1e-13 * self.t.side() {
            if let Some(&f) = shared.first() {
                // several common faces only happen on the smallest
                // Δ-complex tori; pick the face nearest to the crossing
                let (_, b) = self.t.locate(xa);
                let k = &self.t.complex;
                let n = self.t.d;
                let best = (0..=n)
                    .filter(|&j| shared.contains(&k.faces(n, ta)[j]))
                    .min_by(|&i, &j| b[i].total_cmp(&b[j]))
                    .map(|j| k.faces(n, ta)[j])
                    .unwrap_or(f);
                out.push((best, tb));
            } else {
                self.shortest(ta, tb, out);
            }
            return;
        }
        let xm: Vec<f64> = xa.iter().zip(xb).map(|(p, q)| 0.5 * (p + q)).collect();
        let (tm, _) = self.t.locate(&xm);
        if shared.len() > 1 && (tm == ta || tm == tb) {
            if tm == ta {
                self.connect(&xm, tm, xb, tb, depth + 1, out);
            } else {
                self.connect(xa, ta, &xm, tm, depth + 1, out);
            }
            return;
        }
        self.connect(xa, ta, &xm, tm, depth + 1, out);
        self.connect(&xm, tm, xb, tb, depth + 1, out);
    }

    /// Breadth-first route in the dual graph, used when the curve passes
    /// exactly through a lower-dimensional face.
    fn shortest(&self, a: usize, b: usize, out: &mut Vec<(usize, usize)>) {
        let nt = self.adjacency.len();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nt];
        let mut seen = vec![false; nt];
        seen[a] = true;
        let mut q = VecDeque::from([a]);
        while let Some(v) = q.pop_front() {
            if v == b {
                break;
            }
            for &(w, f) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, f));
                    q.push_back(w);
                }
            }
        }
        let mut steps = Vec::new();
        let mut v = b;
        while let Some((u, f)) = prev[v] {
            steps.push((f, v));
            v = u;
        }
        steps.reverse();
        out.extend(steps);
    }

    fn barycenter(&self, top: usize) -> Vec<f64> {
        let c = self.t.top_coordinates(top);
        let m = c.len() as f64;
        (0..self.t.d).map(|i| c.iter().map(|p| p[i]).sum::<f64>() / m).collect()
    }
}

fn trace(t: &TorusMesh, d: &DualComplex, pts: &[Vec<f64>], descriptor: String) -> Result<CellularPath> {
    let tr = Tracer::new(t, d)?;
    let n = t.d;
    let step = t.spacing / SAMPLES_PER_SPACING;
    let mut samples: Vec<Vec<f64>> = Vec::new();
    let mut length = 0.0;
    for w in pts.windows(2) {
        let seg: f64 = w[0].iter().zip(&w[1]).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt();
        length += seg;
        let m = (seg / step).ceil().max(1.0) as usize;
        for i in 0..m {
            let s = i as f64 / m as f64;
            samples.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + s * (b - a)).collect());
        }
    }
    if !(length > 0.0) {
        return Err(Error::DegenerateGeodesic("zero length".into()));
    }
    let located: Vec<(usize, Vec<f64>)> = samples.iter().map(|x| t.locate(x)).collect();
    let mut steps: Vec<(usize, usize)> = Vec::new();
    let ns = samples.len();
    for i in 0..ns {
        let j = (i + 1) % ns;
        // the closing sample is the start point translated by a period;
        // compare against the translate so the last step stays short
        let xb: Vec<f64> = if j == 0 { pts.last().expect("nonempty").clone() } else { samples[j].clone() };
        tr.connect(&samples[i], located[i].0, &xb, located[j].0, 0, &mut steps);
    }
    let mut tops = vec![located[0].0];
    let mut edges = Vec::with_capacity(steps.len());
    let mut coeffs = vec![0.0; d.count(1)];
    let mut displacement = vec![0.0; n];
    let side = t.side();
    for &(f, to) in &steps {
        let from = *tops.last().expect("nonempty");
        let s = tr.sign(f, to);
        edges.push((f, s));
        coeffs[f] += s as f64;
        let (a, b) = (tr.barycenter(from), tr.barycenter(to));
        for i in 0..n {
            let mut dx = b[i] - a[i];
            dx -= side * (dx / side).round();
            displacement[i] += dx;
        }
        tops.push(to);
    }
    let class = displacement.iter().map(|v| (v / side).round() as i64).collect();
    // dual n-cells are vertex stars: follow the vertex of largest barycentric weight
    let owner: Vec<usize> = located
        .iter()
        .map(|(top, b)| {
            let j = (0..=n).max_by(|&p, &q| b[p].total_cmp(&b[q]).then(q.cmp(&p))).expect("n ≥ 0");
            t.complex.simplex(n, *top)[j]
        })
        .collect();
    let mut runs = 1 + owner.windows(2).filter(|w| w[0] != w[1]).count();
    if runs > 1 && owner.first() == owner.last() {
        runs -= 1;
    }
    Ok(CellularPath {
        tops,
        edges,
        chain: Chain::new(1, coeffs),
        cells_crossed: runs,
        length,
        descriptor,
        class,
    })
}
