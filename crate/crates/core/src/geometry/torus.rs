use std::collections::BTreeMap;

use super::{Curvature, MetricData};
use crate::complex::OrientedComplex;
use crate::error::{Error, Result};

/// Standard (Kuhn) triangulation of the flat torus `ℝᵈ/(n·h·ℤ)ᵈ`.
///
/// Each lattice cube with corner `c` is split into `d!` simplices
/// `c, c+e_{π1}, c+e_{π1}+e_{π2}, …`. For `n = 2` distinct edges share
/// vertex pairs and the result is a Δ-complex.
#[derive(Clone, Debug)]
pub struct TorusMesh {
    pub n: usize,
    pub d: usize,
    /// Lattice spacing `h`.
    pub spacing: f64,
    pub complex: OrientedComplex,
    pub metric: MetricData,
    /// (cell index, permutation index) → (top simplex, stored position of
    /// each path vertex).
    lookup: Vec<(usize, Vec<usize>)>,
    /// Inverse of `lookup`: top simplex → (cell, permutation) index.
    origin: Vec<usize>,
    perms: Vec<Vec<usize>>,
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

type Key = (Vec<usize>, Vec<i64>);

/// Generates the mesh; `spacing` is the edge unit `h`, so the torus has side
/// `n·h`.
pub fn torus_mesh(n: usize, d: usize, spacing: f64) -> Result<TorusMesh> {
    if n < 2 {
        return Err(Error::InvalidArgument("torus needs n ≥ 2".into()));
    }
    if d == 0 || d > 4 {
        return Err(Error::InvalidArgument(format!("torus dimension {d} not supported")));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidArgument("spacing must be positive".into()));
    }
    let ni = n as i64;
    let vertex_of = |p: &Vec<i64>| -> usize {
        p.iter().fold(0usize, |acc, &x| acc * n + x.rem_euclid(ni) as usize)
    };
    let key = |pts: &[Vec<i64>]| -> Key {
        let verts: Vec<usize> = pts.iter().map(vertex_of).collect();
        let disp: Vec<i64> = pts
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b))
            .collect();
        (verts, disp)
    };
    let perms = permutations(d);
    let cells = n.pow(d as u32);
    let mut tops: Vec<Vec<Vec<i64>>> = Vec::with_capacity(cells * perms.len());
    // stored position of each path vertex within its sorted top
    let mut path_pos: Vec<Vec<usize>> = Vec::with_capacity(tops.capacity());
    for cell in 0..cells {
        let mut c = vec![0i64; d];
        let mut r = cell;
        for i in (0..d).rev() {
            c[i] = (r % n) as i64;
            r /= n;
        }
        for perm in &perms {
            let mut path = vec![c.clone()];
            let mut p = c.clone();
            for &axis in perm {
                p[axis] += 1;
                path.push(p.clone());
            }
            let mut order: Vec<usize> = (0..=d).collect();
            order.sort_by_key(|&j| vertex_of(&path[j]));
            let mut pos = vec![0; d + 1];
            for (s, &j) in order.iter().enumerate() {
                pos[j] = s;
            }
            tops.push(order.iter().map(|&j| path[j].clone()).collect());
            path_pos.push(pos);
        }
    }
    let labels: Vec<i64> = (0..cells as i64).collect();
    let complex = OrientedComplex::from_keyed_tops(d, labels, &tops, |s| key(s), vertex_of)?;

    let mut sorted_keys: Vec<Key> = tops.iter().map(|t| key(t)).collect();
    sorted_keys.sort();
    let top_index: BTreeMap<Key, usize> =
        sorted_keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    let lookup: Vec<(usize, Vec<usize>)> = tops
        .iter()
        .zip(path_pos)
        .map(|(t, pos)| (top_index[&key(t)], pos))
        .collect();

    let mut lengths = vec![f64::NAN; complex.count(1)];
    for (g, t) in tops.iter().enumerate() {
        let ti = lookup[g].0;
        for a in 0..=d {
            for b in a + 1..=d {
                let e = complex.local_edge(ti, a, b);
                let len2: i64 = t[a].iter().zip(&t[b]).map(|(x, y)| (x - y) * (x - y)).sum();
                lengths[e] = spacing * (len2 as f64).sqrt();
            }
        }
    }
    debug_assert!(lengths.iter().all(|l| l.is_finite()));
    let metric = MetricData::new(Curvature::Flat, lengths);
    let mut origin = vec![0; lookup.len()];
    for (g, (t, _)) in lookup.iter().enumerate() {
        origin[*t] = g;
    }
    Ok(TorusMesh { n, d, spacing, complex, metric, lookup, origin, perms })
}

impl TorusMesh {
    pub fn side(&self) -> f64 {
        self.n as f64 * self.spacing
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.d as i32)
    }

    /// Lattice coordinates of vertex `v` in `[0, n)ᵈ`.
    pub fn vertex_lattice(&self, v: usize) -> Vec<i64> {
        let mut c = vec![0i64; self.d];
        let mut r = v;
        for i in (0..self.d).rev() {
            c[i] = (r % self.n) as i64;
            r /= self.n;
        }
        c
    }

    pub fn vertex_index(&self, p: &[i64]) -> usize {
        let ni = self.n as i64;
        p.iter().fold(0usize, |acc, &x| acc * self.n + x.rem_euclid(ni) as usize)
    }

    /// Top simplex containing the point `x` (ambient coordinates, any
    /// lift) and the barycentric coordinates of `x` in stored vertex order.
    /// Ties on cell walls resolve towards the lower cell and the first
    /// permutation.
    pub fn locate(&self, x: &[f64]) -> (usize, Vec<f64>) {
        let d = self.d;
        let u: Vec<f64> = x.iter().map(|v| v / self.spacing).collect();
        let c: Vec<i64> = u.iter().map(|v| v.floor() as i64).collect();
        let f: Vec<f64> = u.iter().zip(&c).map(|(v, ci)| v - *ci as f64).collect();
        let mut perm: Vec<usize> = (0..d).collect();
        perm.sort_by(|&a, &b| f[b].total_cmp(&f[a]).then(a.cmp(&b)));
        let pidx = self.perms.iter().position(|p| *p == perm).unwrap();
        let cell = self.vertex_index(&c);
        let (top, pos) = &self.lookup[cell * self.perms.len() + pidx];
        let mut lam = vec![0.0; d + 1];
        lam[0] = 1.0 - f[perm[0]];
        for j in 1..d {
            lam[j] = f[perm[j - 1]] - f[perm[j]];
        }
        lam[d] = f[perm[d - 1]];
        let mut b = vec![0.0; d + 1];
        for j in 0..=d {
            b[pos[j]] = lam[j];
        }
        (*top, b)
    }

    /// Ambient coordinates of the vertices of top `t` in stored order,
    /// unwrapped so that they form the simplex containing the first one.
    pub fn top_coordinates(&self, t: usize) -> Vec<Vec<f64>> {
        let g = self.origin[t];
        let np = self.perms.len();
        let cell = g / np;
        let perm = &self.perms[g % np];
        let c = self.vertex_lattice(cell);
        let mut path = vec![c.clone()];
        let mut p = c;
        for &axis in perm {
            p[axis] += 1;
            path.push(p.clone());
        }
        let pos = &self.lookup[g].1;
        let mut out = vec![Vec::new(); self.d + 1];
        for (j, q) in path.iter().enumerate() {
            out[pos[j]] = q.iter().map(|&v| v as f64 * self.spacing).collect();
        }
        out
    }
}
