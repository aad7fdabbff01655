use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use ordered_float::OrderedFloat;
use rayon::prelude::*;

use crate::complex::OrientedComplex;
use crate::error::{Error, Result};
use crate::geometry::{simplex_volume, MetricData, QuadratureRule};

#[derive(Clone, Debug, PartialEq)]
pub struct DiameterReport {
    /// Largest hop count between two vertices.
    pub combinatorial: usize,
    /// Largest edge-length-weighted distance between two vertices.
    pub weighted: f64,
    pub volume: f64,
    /// `weighted / volume`.
    pub b0_hat: f64,
}

/// Total volume by quadrature over the top simplices.
pub fn complex_volume(k: &OrientedComplex, m: &MetricData, order: usize) -> Result<f64> {
    (0..k.count(k.dim()))
        .into_par_iter()
        .map(|t| {
            let s = m.realize(k, t)?;
            let lens = m.simplex_lengths(k, t);
            let max = lens.iter().copied().fold(0.0, f64::max);
            let q = QuadratureRule::adapted(k.dim(), order, m.curvature, max)?;
            simplex_volume(&s, &q)
        })
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.iter().sum())
}

/// All-pairs shortest paths on the 1-skeleton.
pub fn graph_diameter(k: &OrientedComplex, m: &MetricData) -> Result<DiameterReport> {
    m.validate(k)?;
    let nv = k.count(0);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    for (e, s) in k.simplices(1).iter().enumerate() {
        adj[s[0]].push((s[1], m.lengths[e]));
        adj[s[1]].push((s[0], m.lengths[e]));
    }
    let per_source: Vec<Option<(usize, f64)>> = (0..nv)
        .into_par_iter()
        .map(|src| {
            let mut hops = vec![usize::MAX; nv];
            hops[src] = 0;
            let mut q = VecDeque::from([src]);
            while let Some(v) = q.pop_front() {
                for &(w, _) in &adj[v] {
                    if hops[w] == usize::MAX {
                        hops[w] = hops[v] + 1;
                        q.push_back(w);
                    }
                }
            }
            if hops.contains(&usize::MAX) {
                return None;
            }
            let mut dist = vec![f64::INFINITY; nv];
            dist[src] = 0.0;
            let mut heap = BinaryHeap::from([Reverse((OrderedFloat(0.0), src))]);
            while let Some(Reverse((OrderedFloat(dv), v))) = heap.pop() {
                if dv > dist[v] {
                    continue;
                }
                for &(w, l) in &adj[v] {
                    let nd = dv + l;
                    if nd < dist[w] {
                        dist[w] = nd;
                        heap.push(Reverse((OrderedFloat(nd), w)));
                    }
                }
            }
            let h = hops.into_iter().max().unwrap_or(0);
            let d = dist.into_iter().fold(0.0, f64::max);
            Some((h, d))
        })
        .collect();
    let mut combinatorial = 0;
    let mut weighted = 0.0f64;
    for r in per_source {
        let (h, d) = r.ok_or(Error::Disconnected)?;
        combinatorial = combinatorial.max(h);
        weighted = weighted.max(d);
    }
    let volume = complex_volume(k, m, 4)?;
    Ok(DiameterReport { combinatorial, weighted, volume, b0_hat: weighted / volume })
}
