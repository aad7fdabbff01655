use std::collections::VecDeque;

use num_integer::Integer;

use crate::complex::{Chain, IncidenceMatrix, OrientedComplex};
use crate::error::{Error, Result};

/// Largest denominator accepted when reading a coefficient as a fraction.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

/// A closed walk in a 1-skeleton. `vertices` has one more entry than
/// `edges` and starts and ends at the same vertex; each edge carries the
/// direction it is traversed in (`+1` along its orientation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLoop {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, i8)>,
}

impl EdgeLoop {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct LoopDecomposition {
    /// `N` with `N z` integral.
    pub scale: u64,
    /// One closed walk per connected piece of the support.
    pub loops: Vec<EdgeLoop>,
}

impl LoopDecomposition {
    /// Signed edge multiset of all loops together.
    pub fn multiset(&self, edges: usize) -> Vec<i64> {
        let mut m = vec![0i64; edges];
        for l in &self.loops {
            for &(e, s) in &l.edges {
                m[e] += s as i64;
            }
        }
        m
    }

    pub fn total_length(&self) -> usize {
        self.loops.iter().map(EdgeLoop::len).sum()
    }
}

/// Best fraction `p/q` with `q ≤ MAX_DENOMINATOR` by continued fractions,
/// accepted when within `1e−13` relative.
pub fn rationalize(x: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-13 * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOMINATOR {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    (k1 > 0 && (x - h1 as f64 / k1 as f64).abs() <= tol).then_some((h1, k1))
}

fn endpoints(d1: &IncidenceMatrix) -> Result<Vec<(usize, usize)>> {
    d1.columns()
        .iter()
        .enumerate()
        .map(|(e, col)| {
            let from = col.iter().find(|x| x.1 < 0).map(|x| x.0);
            let to = col.iter().find(|x| x.1 > 0).map(|x| x.0);
            match (from, to) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(Error::InvalidArgument(format!("edge {e} is a loop at one vertex"))),
            }
        })
        .collect()
}

/// Splits a rational 1-cycle of `K` into closed edge walks of `N z`.
pub fn cycle_to_loops(k: &OrientedComplex, z: &Chain) -> Result<LoopDecomposition> {
    cycle_to_loops_with(&k.boundary_matrix(1)?, z)
}

/// Same as [`cycle_to_loops`] for any 1-skeleton given by its boundary matrix.
pub fn cycle_to_loops_with(d1: &IncidenceMatrix, z: &Chain) -> Result<LoopDecomposition> {
    if z.degree != 1 || z.len() != d1.ncols() {
        return Err(Error::InvalidArgument("expected a 1-chain on this complex".into()));
    }
    let fr: Vec<(i64, i64)> = z
        .coeffs
        .iter()
        .map(|&x| rationalize(x).ok_or(Error::NotRational(x)))
        .collect::<Result<_>>()?;
    let mut scale: i64 = 1;
    for &(_, q) in &fr {
        scale = scale.lcm(&q);
        if scale > i64::MAX / (1 << 20) {
            return Err(Error::NotRational(q as f64));
        }
    }
    let mult: Vec<i64> = fr
        .iter()
        .map(|&(p, q)| p.checked_mul(scale / q).ok_or(Error::NotRational(p as f64 / q as f64)))
        .collect::<Result<_>>()?;
    let bd = d1.mul_vec_i64(&mult);
    if let Some(r) = bd.iter().find(|v| **v != 0) {
        return Err(Error::NotACycle(*r as f64 / scale as f64));
    }
    let ends = endpoints(d1)?;
    let nv = d1.nrows();
    let mut out: Vec<Vec<(usize, i8)>> = vec![Vec::new(); nv];
    for (e, &m) in mult.iter().enumerate() {
        let (a, b) = ends[e];
        let (from, s) = if m > 0 { (a, 1i8) } else { (b, -1i8) };
        for _ in 0..m.unsigned_abs() {
            out[from].push((e, s));
        }
    }
    let head = |(e, s): (usize, i8)| if s > 0 { ends[e].1 } else { ends[e].0 };
    let mut ptr = vec![0usize; nv];
    let mut loops = Vec::new();
    for start in 0..nv {
        if ptr[start] == out[start].len() {
            continue;
        }
        let mut stack: Vec<(usize, Option<(usize, i8)>)> = vec![(start, None)];
        let mut circuit = Vec::new();
        while let Some(&(v, arc)) = stack.last() {
            if ptr[v] < out[v].len() {
                let a = out[v][ptr[v]];
                ptr[v] += 1;
                stack.push((head(a), Some(a)));
            } else {
                stack.pop();
                if let Some(a) = arc {
                    circuit.push(a);
                }
            }
        }
        circuit.reverse();
        let mut vertices = vec![start];
        for &a in &circuit {
            vertices.push(head(a));
        }
        loops.push(EdgeLoop { vertices, edges: circuit });
    }
    Ok(LoopDecomposition { scale: scale as u64, loops })
}

/// Joins the loops into one closed walk at `base`, reaching each loop by a
/// shortest edge path and returning along it.
pub fn based_loop(k: &OrientedComplex, loops: &[EdgeLoop], base: usize) -> Result<EdgeLoop> {
    let nv = k.count(0);
    if base >= nv {
        return Err(Error::InvalidArgument(format!("vertex {base} out of range")));
    }
    let mut adj: Vec<Vec<(usize, usize, i8)>> = vec![Vec::new(); nv];
    for (e, s) in k.simplices(1).iter().enumerate() {
        adj[s[0]].push((s[1], e, 1));
        adj[s[1]].push((s[0], e, -1));
    }
    let mut prev: Vec<Option<(usize, usize, i8)>> = vec![None; nv];
    let mut seen = vec![false; nv];
    seen[base] = true;
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for &(w, e, s) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, e, s));
                queue.push_back(w);
            }
        }
    }
    let mut out = EdgeLoop { vertices: vec![base], edges: Vec::new() };
    for l in loops {
        let target = l.vertices[0];
        if !seen[target] {
            return Err(Error::Disconnected);
        }
        let mut arc = Vec::new();
        let mut v = target;
        while let Some((u, e, s)) = prev[v] {
            arc.push((u, v, e, s));
            v = u;
        }
        arc.reverse();
        for &(_, v, e, s) in &arc {
            out.edges.push((e, s));
            out.vertices.push(v);
        }
        out.edges.extend_from_slice(&l.edges);
        out.vertices.extend_from_slice(&l.vertices[1..]);
        for &(u, _, e, s) in arc.iter().rev() {
            out.edges.push((e, -s));
            out.vertices.push(u);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> OrientedComplex {
        OrientedComplex::from_top_simplices(2, (0..6).collect(), &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap()
    }

    #[test]
    fn fractions() {
        assert_eq!(rationalize(0.5), Some((1, 2)));
        assert_eq!(rationalize(-2.0 / 3.0), Some((-2, 3)));
        assert_eq!(rationalize(std::f64::consts::PI), None);
    }

    #[test]
    fn disjoint_triangles_give_two_loops() {
        let k = two_triangles();
        let d2 = k.boundary_matrix(2).unwrap();
        let z: Vec<f64> = d2.mul_vec(&[1.0, 1.0]);
        let dec = cycle_to_loops(&k, &Chain::new(1, z.clone())).unwrap();
        assert_eq!(dec.loops.len(), 2);
        assert!(dec.loops.iter().all(|l| l.len() == 3));
        let m = dec.multiset(k.count(1));
        assert!(m.iter().zip(&z).all(|(a, b)| *a as f64 == *b));
        let joined = based_loop(&k, &dec.loops[..1], 1).unwrap();
        assert_eq!(joined.vertices.first(), joined.vertices.last());
    }

    #[test]
    fn halves_are_scaled() {
        let k = two_triangles();
        let z: Vec<f64> = k.boundary_matrix(2).unwrap().mul_vec(&[0.5, 0.0]);
        let dec = cycle_to_loops(&k, &Chain::new(1, z)).unwrap();
        assert_eq!(dec.scale, 2);
        assert_eq!(dec.loops.len(), 1);
        assert_eq!(dec.total_length(), 3);
    }
}
