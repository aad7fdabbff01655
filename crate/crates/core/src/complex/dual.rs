//! Barycentric subdivision, the dual celluation and Poincaré duality.
//!
//! Vertices of the subdivision `τ(K)` are the simplices of `K`, numbered by
//! a global id `offset[k] + i`. Since offsets increase with degree, every
//! flag `σ₀ < σ₁ < … < σ_m` is a strictly increasing id list and is stored
//! in flag order.
//!
//! The dual cell `σ*` of a `k`-simplex is the chain of `τ(K)` simplices whose
//! flags start at `σ`, oriented so that `σ` followed by `σ*` gives the
//! orientation of `K`. Dual vertices are always `+1`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{Chain, Cochain, IncidenceMatrix, OrientedComplex};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DualComplex {
    n: usize,
    offsets: Vec<usize>,
    subdivision: OrientedComplex,
    /// `cells[j][i]`: dual `j`-cell of the `(n−j)`-simplex `i`, as a signed
    /// list of `τ(K)` simplices of degree `j`.
    cells: Vec<Vec<Vec<(usize, i8)>>>,
    /// `boundary[j]` is `∂*_j`, empty at `j = 0`.
    boundary: Vec<IncidenceMatrix>,
    /// Sign of `Φ(δ_σ) = φ_σ σ*`, indexed like the simplices of `K`.
    phi: Vec<Vec<i8>>,
    /// Fan triangles of the dual 2-cells: (cell, side) in lexicographic
    /// order, with `fan_start[c]` the first triangle of cell `c`.
    fan: Vec<(usize, usize)>,
    fan_start: Vec<usize>,
}

/// All flags of local position masks inside one top simplex of dimension `n`:
/// one per permutation of the vertex positions.
fn mask_flags(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..=n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut m = 0u32;
        out.push(
            p.iter()
                .map(|&i| {
                    m |= 1 << i;
                    m
                })
                .collect(),
        );
    });
    out.sort();
    out
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Orientation of the affine simplex spanned by the vertices of `masks[0]`
/// followed by the barycenters of `masks[1..]`, relative to the standard
/// orientation of the ambient `n`-simplex.
fn join_sign(n: usize, masks: &[u32]) -> i8 {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for p in 0..=n {
        if masks[0] & (1 << p) != 0 {
            let mut r = vec![0.0; n + 1];
            r[p] = 1.0;
            rows.push(r);
        }
    }
    for &m in &masks[1..] {
        // barycenter scaled by the face size keeps the entries integral
        rows.push((0..=n).map(|p| if m & (1 << p) != 0 { 1.0 } else { 0.0 }).collect());
    }
    debug_assert_eq!(rows.len(), n + 1);
    let det = DMatrix::from_fn(n + 1, n + 1, |i, j| rows[i][j]).determinant();
    assert!(det.abs() > 0.5, "flag simplex is degenerate");
    if det > 0.0 {
        1
    } else {
        -1
    }
}

impl DualComplex {
    /// Builds `τ(K)`, the dual cells, their boundary operators and the
    /// Poincaré duality signs. `K` must be a closed oriented pseudomanifold.
    pub fn new(k: &OrientedComplex) -> Result<Self> {
        let orient = k.require_orientation()?.to_vec();
        if !k.is_closed_pseudomanifold() {
            return Err(Error::NotOrientable(
                "dual celluation needs a closed pseudomanifold (no fundamental cycle)".into(),
            ));
        }
        let n = k.dim();
        let mut offsets = vec![0usize; n + 2];
        for d in 0..=n {
            offsets[d + 1] = offsets[d] + k.count(d);
        }
        let gid = |t: usize, m: u32| {
            let r = k.face_by_mask(n, t, m);
            offsets[r.degree] + r.index
        };

        let flags = mask_flags(n);
        let mut tau_tops = Vec::with_capacity(k.count(n) * flags.len());
        for t in 0..k.count(n) {
            for f in &flags {
                tau_tops.push(f.iter().map(|&m| gid(t, m)).collect::<Vec<_>>());
            }
        }
        let labels: Vec<i64> = (0..offsets[n + 1] as i64).collect();
        let subdivision = OrientedComplex::from_top_simplices(n, labels, &tau_tops)?;

        // dual cells from flag tails
        let mut cell_maps: Vec<Vec<BTreeMap<usize, i8>>> =
            (0..=n).map(|j| vec![BTreeMap::new(); k.count(n - j)]).collect();
        for t in 0..k.count(n) {
            for f in &flags {
                for deg in 0..=n {
                    let tail = &f[deg..];
                    let j = n - deg;
                    let ids: Vec<usize> = tail.iter().map(|&m| gid(t, m)).collect();
                    let tau = subdivision
                        .find(j, &ids)
                        .expect("flag tail is a simplex of the subdivision");
                    let sigma = ids[0] - offsets[deg];
                    let sign = if j == 0 { 1 } else { orient[t] * join_sign(n, tail) };
                    let prev = cell_maps[j][sigma].insert(tau, sign);
                    if let Some(p) = prev {
                        if p != sign {
                            return Err(Error::NotOrientable(format!(
                                "inconsistent orientation of the dual cell of simplex {sigma} in degree {deg}"
                            )));
                        }
                    }
                }
            }
        }
        let cells: Vec<Vec<Vec<(usize, i8)>>> = cell_maps
            .into_iter()
            .map(|level| level.into_iter().map(|m| m.into_iter().collect()).collect())
            .collect();

        // ∂* from the subdivision boundary, verified cell by cell
        let mut boundary = vec![IncidenceMatrix::zeros(0, 0)];
        for j in 1..=n {
            let deg = n - j;
            let db = subdivision.boundary_matrix(j)?;
            let mut cols = Vec::with_capacity(k.count(deg));
            for (sigma, chain) in cells[j].iter().enumerate() {
                let mut image: BTreeMap<usize, i64> = BTreeMap::new();
                for &(tau, s) in chain {
                    for &(r, v) in db.column(tau) {
                        *image.entry(r).or_default() += v * s as i64;
                    }
                }
                image.retain(|_, v| *v != 0);
                let mut col = Vec::new();
                let mut expect: BTreeMap<usize, i64> = BTreeMap::new();
                for &c in k.cofaces(deg, sigma) {
                    let (rep, rs) = cells[j - 1][c][0];
                    let coeff = image.get(&rep).copied().unwrap_or(0) * rs as i64;
                    if coeff != 0 {
                        col.push((c, coeff));
                        for &(tau, s) in &cells[j - 1][c] {
                            *expect.entry(tau).or_default() += coeff * s as i64;
                        }
                    }
                }
                expect.retain(|_, v| *v != 0);
                if expect != image {
                    return Err(Error::NotOrientable(format!(
                        "boundary of the dual cell of simplex {sigma} in degree {deg} is not a sum of dual cells"
                    )));
                }
                cols.push(col);
            }
            boundary.push(IncidenceMatrix::from_columns(k.count(deg + 1), cols));
        }

        // Φ signs with ∂*Φ = (−1)^k Φ d
        let mut phi: Vec<Vec<i8>> = (0..=n).map(|d| vec![0i8; k.count(d)]).collect();
        phi[0].iter_mut().for_each(|s| *s = 1);
        for deg in 0..n {
            let parity: i64 = if deg % 2 == 0 { 1 } else { -1 };
            let bd = &boundary[n - deg];
            for tau in 0..k.count(deg + 1) {
                // face 0 has incidence +1
                let sigma = k.faces(deg + 1, tau)[0];
                let c = bd.get(tau, sigma);
                if c.abs() != 1 {
                    return Err(Error::NotOrientable(format!(
                        "dual incidence {c} between simplices {sigma} and {tau}"
                    )));
                }
                phi[deg + 1][tau] = (parity * phi[deg][sigma] as i64 * c) as i8;
            }
        }
        let dual = Self {
            n,
            offsets,
            subdivision,
            cells,
            boundary,
            phi,
            fan: Vec::new(),
            fan_start: Vec::new(),
        };
        dual.verify_chain_map(k)?;
        Ok(dual.with_fans(k))
    }

    fn with_fans(mut self, k: &OrientedComplex) -> Self {
        if self.n < 2 {
            return self;
        }
        let deg = self.n - 2;
        let mut fan = Vec::new();
        let mut start = Vec::with_capacity(k.count(deg) + 1);
        for sigma in 0..k.count(deg) {
            start.push(fan.len());
            for &side in k.cofaces(deg, sigma) {
                fan.push((sigma, side));
            }
        }
        start.push(fan.len());
        self.fan = fan;
        self.fan_start = start;
        self
    }

    fn verify_chain_map(&self, k: &OrientedComplex) -> Result<()> {
        for deg in 0..self.n {
            let parity: i64 = if deg % 2 == 0 { 1 } else { -1 };
            let d = k.coboundary_matrix(deg)?;
            let phi_k = diag(&self.phi[deg]);
            let phi_k1 = diag(&self.phi[deg + 1]);
            let lhs = self.boundary[self.n - deg].matmul(&phi_k);
            let rhs = phi_k1.matmul(&d);
            let rhs = IncidenceMatrix::from_columns(
                rhs.nrows(),
                rhs.columns()
                    .iter()
                    .map(|c| c.iter().map(|&(i, v)| (i, parity * v)).collect())
                    .collect(),
            );
            if lhs != rhs {
                return Err(Error::NotOrientable(format!(
                    "Poincaré duality signs fail to commute with d in degree {deg}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The barycentric subdivision `τ(K)`.
    pub fn subdivision(&self) -> &OrientedComplex {
        &self.subdivision
    }

    /// Global id of simplex `(k, i)` of `K` as a vertex of `τ(K)`.
    pub fn barycenter_id(&self, k: usize, i: usize) -> usize {
        self.offsets[k] + i
    }

    /// Number of dual `j`-cells.
    pub fn count(&self, j: usize) -> usize {
        self.cells.get(j).map_or(0, Vec::len)
    }

    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.n).map(|j| self.count(j)).collect()
    }

    /// Dual cell `i` of degree `j` as a signed chain of `τ(K)` simplices.
    pub fn cell(&self, j: usize, i: usize) -> &[(usize, i8)] {
        &self.cells[j][i]
    }

    /// `∂*_j : C_j(K*) → C_{j−1}(K*)`.
    pub fn boundary_matrix(&self, j: usize) -> Result<IncidenceMatrix> {
        if j == 0 || j > self.n {
            return Err(Error::DegreeOutOfRange { degree: j, dim: self.n });
        }
        Ok(self.boundary[j].clone())
    }

    pub fn phi_signs(&self, k: usize) -> &[i8] {
        &self.phi[k]
    }

    /// Poincaré duality `Φ : C^k(K) → C_{n−k}(K*)`.
    pub fn phi(&self, f: &Cochain) -> Result<Chain> {
        let k = f.degree;
        if k > self.n {
            return Err(Error::DegreeOutOfRange { degree: k, dim: self.n });
        }
        if f.len() != self.phi[k].len() {
            return Err(Error::InvalidArgument("cochain length does not match the complex".into()));
        }
        let coeffs = f.coeffs.iter().zip(&self.phi[k]).map(|(a, &s)| a * s as f64).collect();
        Ok(Chain::new(self.n - k, coeffs))
    }

    /// Inverse of [`phi`](Self::phi): dual `j`-chains back to `(n−j)`-cochains.
    pub fn phi_inverse(&self, c: &Chain) -> Result<Cochain> {
        let j = c.degree;
        if j > self.n {
            return Err(Error::DegreeOutOfRange { degree: j, dim: self.n });
        }
        let k = self.n - j;
        if c.len() != self.phi[k].len() {
            return Err(Error::InvalidArgument("chain length does not match the complex".into()));
        }
        let coeffs = c.coeffs.iter().zip(&self.phi[k]).map(|(a, &s)| a * s as f64).collect();
        Ok(Chain::new(k, coeffs))
    }

    /// Number of sides of dual 2-cell `i`.
    pub fn sides(&self, i: usize) -> usize {
        self.fan_start[i + 1] - self.fan_start[i]
    }

    /// Fan triangles as (dual 2-cell, side) pairs.
    pub fn fan_triangles(&self) -> &[(usize, usize)] {
        &self.fan
    }

    /// Replaces each dual 2-cell with its fan of triangles from the cell's
    /// barycenter, one per side, each oriented like the cell.
    pub fn subdivide_chain(&self, c: &Chain) -> Result<Chain> {
        if c.degree != 2 {
            return Err(Error::DegreeMismatch { expected: 2, got: c.degree });
        }
        if self.n < 2 || c.len() != self.count(2) {
            return Err(Error::InvalidArgument("chain length does not match the dual 2-cells".into()));
        }
        let coeffs = self.fan.iter().map(|&(cell, _)| c.coeffs[cell]).collect();
        Ok(Chain::new(2, coeffs))
    }

    /// The same chain written on the triangles of `τ(K)`; every side of a
    /// dual cell then contributes two triangles.
    pub fn subdivide_chain_barycentric(&self, c: &Chain) -> Result<Chain> {
        if c.degree != 2 {
            return Err(Error::DegreeMismatch { expected: 2, got: c.degree });
        }
        if self.n < 2 || c.len() != self.count(2) {
            return Err(Error::InvalidArgument("chain length does not match the dual 2-cells".into()));
        }
        let mut coeffs = vec![0.0; self.subdivision.count(2)];
        for (i, &a) in c.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for &(tau, s) in &self.cells[2][i] {
                coeffs[tau] += a * s as f64;
            }
        }
        Ok(Chain::new(2, coeffs))
    }
}

fn diag(s: &[i8]) -> IncidenceMatrix {
    IncidenceMatrix::from_columns(
        s.len(),
        s.iter().enumerate().map(|(i, &v)| vec![(i, v as i64)]).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::homology::betti_numbers;

    fn sphere() -> OrientedComplex {
        let tops = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
        OrientedComplex::from_top_simplices(2, vec![0, 1, 2, 3], &tops).unwrap()
    }

    #[test]
    fn sphere_dual_counts() {
        let k = sphere();
        let d = DualComplex::new(&k).unwrap();
        assert_eq!(d.f_vector(), vec![4, 6, 4]);
        assert_eq!(d.subdivision().count(2), 6 * 4);
        assert_eq!(betti_numbers(d.subdivision()), vec![1, 0, 1]);
        for i in 0..4 {
            assert_eq!(d.sides(i), 3);
            assert_eq!(d.cell(2, i).len(), 6);
        }
        let b1 = d.boundary_matrix(1).unwrap();
        let b2 = d.boundary_matrix(2).unwrap();
        assert!(b1.matmul(&b2).is_zero());
    }

    #[test]
    fn dual_cells_are_unions_of_subdivision_simplices() {
        let k = sphere();
        let d = DualComplex::new(&k).unwrap();
        let total: usize = (0..d.count(2)).map(|i| d.cell(2, i).len()).sum();
        assert_eq!(total, d.subdivision().count(2));
    }

    #[test]
    fn open_complex_is_rejected() {
        let k = OrientedComplex::from_top_simplices(2, vec![0, 1, 2], &[vec![0, 1, 2]]).unwrap();
        assert!(DualComplex::new(&k).is_err());
    }

    #[test]
    fn phi_preserves_norm_and_inverts() {
        let k = sphere();
        let d = DualComplex::new(&k).unwrap();
        let f = Chain::new(1, vec![1.0, -2.0, 0.5, 0.0, 3.0, -1.0]);
        let a = d.phi(&f).unwrap();
        assert_eq!(a.degree, 1);
        let g: f64 = f.coeffs.iter().map(|x| x.abs()).sum();
        let h: f64 = a.coeffs.iter().map(|x| x.abs()).sum();
        assert_eq!(g, h);
        assert_eq!(d.phi_inverse(&a).unwrap(), f);
    }

    #[test]
    fn fan_subdivision_triples_on_the_sphere() {
        let k = sphere();
        let d = DualComplex::new(&k).unwrap();
        let c = Chain::new(2, vec![1.0, -2.0, 0.0, 0.5]);
        let t = d.subdivide_chain(&c).unwrap();
        let norm = |x: &Chain| x.coeffs.iter().map(|v| v.abs()).sum::<f64>();
        assert_eq!(norm(&t), 3.0 * norm(&c));
        let b = d.subdivide_chain_barycentric(&c).unwrap();
        assert_eq!(norm(&b), 6.0 * norm(&c));
        assert!(matches!(
            d.subdivide_chain(&Chain::zeros(1, 6)),
            Err(Error::DegreeMismatch { .. })
        ));
    }
}
