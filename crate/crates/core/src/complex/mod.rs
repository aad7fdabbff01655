//! Oriented simplicial complexes, their boundary operators and stars.
//!
//! Simplices are stored per degree with an explicit vertex order and explicit
//! face maps: face `j` of a `k`-simplex omits its `j`-th vertex. For complexes
//! read from files the vertex order is increasing and faces are determined by
//! vertex sets. The torus generator may also emit Δ-complexes (for the `n = 2`
//! torus two distinct edges share a vertex pair), which is why faces are
//! never looked up by vertex set alone.

pub mod dual;
pub mod homology;
pub mod incidence;
pub mod io;
pub mod library;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
pub use incidence::IncidenceMatrix;

#[derive(Clone, Debug)]
pub struct OrientedComplex {
    dim: usize,
    labels: Vec<i64>,
    simplices: Vec<Vec<Vec<usize>>>,
    faces: Vec<Vec<Vec<usize>>>,
    cofaces: Vec<Vec<Vec<usize>>>,
    orientation: Option<Vec<i8>>,
}

/// Reference to a simplex by degree and index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplexRef {
    pub degree: usize,
    pub index: usize,
}

impl OrientedComplex {
    /// Builds the closure of a list of top simplices given as vertex lists.
    ///
    /// Vertex lists are sorted, so the result is an ordinary simplicial
    /// complex with lexicographic indexing. `labels[v]` is the external name
    /// of vertex `v`.
    pub fn from_top_simplices(dim: usize, labels: Vec<i64>, tops: &[Vec<usize>]) -> Result<Self> {
        let tops: Vec<Vec<usize>> = tops
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.sort_unstable();
                t
            })
            .collect();
        for t in &tops {
            if t.len() != dim + 1 {
                return Err(Error::InvalidArgument(format!(
                    "simplex {t:?} does not have {} vertices",
                    dim + 1
                )));
            }
            if t.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("repeated vertex in {t:?}")));
            }
            if t.iter().any(|&v| v >= labels.len()) {
                return Err(Error::InvalidArgument(format!("vertex out of range in {t:?}")));
            }
        }
        Self::from_keyed_tops(dim, labels, &tops, |s| s.to_vec(), |p| *p)
    }

    /// General constructor: each top simplex is an ordered list of points
    /// `P`; `vertex_of` maps a point to its vertex index and `key` maps an
    /// ordered sub-list of points to the identity of the face it spans.
    /// Simplices of each degree are ordered by (vertex tuple, key).
    pub fn from_keyed_tops<P, Q, FK, FV>(
        dim: usize,
        labels: Vec<i64>,
        tops: &[Vec<P>],
        key: FK,
        vertex_of: FV,
    ) -> Result<Self>
    where
        P: Clone,
        Q: Ord + Clone,
        FK: Fn(&[P]) -> Q,
        FV: Fn(&P) -> usize,
    {
        if tops.is_empty() {
            return Err(Error::InvalidArgument("complex has no simplices".into()));
        }
        // degree -> (vertex tuple, key) -> representative point list
        let mut by_degree: Vec<BTreeMap<(Vec<usize>, Q), Vec<P>>> =
            (0..=dim).map(|_| BTreeMap::new()).collect();
        for top in tops {
            if top.len() != dim + 1 {
                return Err(Error::InvalidArgument("top simplex of wrong size".into()));
            }
            for mask in 1u32..(1u32 << (dim + 1)) {
                let sub: Vec<P> = (0..=dim)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| top[i].clone())
                    .collect();
                let verts: Vec<usize> = sub.iter().map(&vertex_of).collect();
                let k = sub.len() - 1;
                by_degree[k].entry((verts, key(&sub))).or_insert(sub);
            }
        }
        let vertex_count = labels.len();
        if by_degree[0].len() != vertex_count {
            return Err(Error::PurityViolation(format!(
                "{} of {} vertices belong to no top simplex",
                vertex_count - by_degree[0].len(),
                vertex_count
            )));
        }
        let index: Vec<BTreeMap<Q, usize>> = by_degree
            .iter()
            .map(|m| m.keys().enumerate().map(|(i, (_, q))| (q.clone(), i)).collect())
            .collect();
        for (k, m) in by_degree.iter().enumerate() {
            if index[k].len() != m.len() {
                return Err(Error::InvalidArgument(format!(
                    "face keys collide in degree {k}"
                )));
            }
        }
        let mut simplices = Vec::with_capacity(dim + 1);
        let mut faces = Vec::with_capacity(dim + 1);
        for (k, m) in by_degree.iter().enumerate() {
            let mut sk = Vec::with_capacity(m.len());
            let mut fk = Vec::with_capacity(m.len());
            for ((verts, _), pts) in m {
                sk.push(verts.clone());
                if k == 0 {
                    fk.push(Vec::new());
                    continue;
                }
                let f: Vec<usize> = (0..=k)
                    .map(|j| {
                        let sub: Vec<P> = pts
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != j)
                            .map(|(_, p)| p.clone())
                            .collect();
                        index[k - 1][&key(&sub)]
                    })
                    .collect();
                fk.push(f);
            }
            simplices.push(sk);
            faces.push(fk);
        }
        // vertices must be indexed 0..V in order
        for (i, v) in simplices[0].iter().enumerate() {
            if v[0] != i {
                return Err(Error::InvalidArgument("vertex indices are not contiguous".into()));
            }
        }
        let mut complex = Self {
            dim,
            labels,
            cofaces: Vec::new(),
            simplices,
            faces,
            orientation: None,
        };
        complex.cofaces = complex.compute_cofaces();
        complex.orientation = complex.compute_orientation().ok();
        Ok(complex)
    }

    fn compute_cofaces(&self) -> Vec<Vec<Vec<usize>>> {
        let mut cof: Vec<Vec<Vec<usize>>> =
            (0..=self.dim).map(|k| vec![Vec::new(); self.count(k)]).collect();
        for k in 1..=self.dim {
            for (i, f) in self.faces[k].iter().enumerate() {
                for &g in f {
                    cof[k - 1][g].push(i);
                }
            }
        }
        for level in cof.iter_mut() {
            for c in level.iter_mut() {
                c.sort_unstable();
                c.dedup();
            }
        }
        cof
    }

    /// Propagates a coherent sign across codimension-one faces.
    ///
    /// Faces with one coface (boundary) impose nothing; faces with more than
    /// two cofaces make the complex non-orientable in this sense.
    fn compute_orientation(&self) -> Result<Vec<i8>> {
        let n = self.dim;
        let tops = self.count(n);
        if n == 0 {
            return Ok(vec![1; tops]);
        }
        for (f, c) in self.cofaces[n - 1].iter().enumerate() {
            if c.len() > 2 {
                return Err(Error::NotOrientable(format!(
                    "face {f} of degree {} has {} cofaces",
                    n - 1,
                    c.len()
                )));
            }
        }
        let mut sign = vec![0i8; tops];
        for start in 0..tops {
            if sign[start] != 0 {
                continue;
            }
            sign[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(s) = queue.pop_front() {
                for (j, &f) in self.faces[n][s].iter().enumerate() {
                    let inc_s = incidence_sign(j) * sign[s];
                    for &t in &self.cofaces[n - 1][f] {
                        if t == s {
                            continue;
                        }
                        let jt = self.faces[n][t].iter().position(|&g| g == f).unwrap();
                        let want = -inc_s * incidence_sign(jt);
                        if sign[t] == 0 {
                            sign[t] = want;
                            queue.push_back(t);
                        } else if sign[t] != want {
                            return Err(Error::NotOrientable(format!(
                                "incompatible orientation across face {f}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(sign)
    }

    /// Replaces the orientation with a caller-supplied one after checking it.
    pub fn set_orientation(&mut self, signs: Vec<i8>) -> Result<()> {
        let n = self.dim;
        if signs.len() != self.count(n) || signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::NotOrientable("orientation must be ±1 per top simplex".into()));
        }
        if n > 0 {
            for (f, cof) in self.cofaces[n - 1].iter().enumerate() {
                if cof.len() == 2 {
                    let total: i64 = cof
                        .iter()
                        .map(|&t| {
                            let j = self.faces[n][t].iter().position(|&g| g == f).unwrap();
                            (incidence_sign(j) * signs[t]) as i64
                        })
                        .sum();
                    if total != 0 {
                        return Err(Error::NotOrientable(format!(
                            "supplied orientation is incompatible across face {f}"
                        )));
                    }
                }
            }
        }
        self.orientation = Some(signs);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    /// Face counts `f_0, …, f_n`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.dim).map(|k| self.count(k)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim)
            .map(|k| if k % 2 == 0 { self.count(k) as i64 } else { -(self.count(k) as i64) })
            .sum()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Vertices of simplex `i` of degree `k`, in stored order.
    pub fn simplex(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices[k][i]
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        &self.simplices[k]
    }

    /// Face indices of simplex `i` of degree `k ≥ 1`; entry `j` omits vertex `j`.
    pub fn faces(&self, k: usize, i: usize) -> &[usize] {
        &self.faces[k][i]
    }

    /// Indices of the `(k+1)`-simplices having simplex `i` as a face.
    pub fn cofaces(&self, k: usize, i: usize) -> &[usize] {
        &self.cofaces[k][i]
    }

    pub fn orientation(&self) -> Option<&[i8]> {
        self.orientation.as_deref()
    }

    pub fn require_orientation(&self) -> Result<&[i8]> {
        self.orientation
            .as_deref()
            .ok_or_else(|| Error::NotOrientable("no coherent orientation exists".into()))
    }

    /// True when every codimension-one face has exactly two cofaces.
    pub fn is_closed_pseudomanifold(&self) -> bool {
        self.dim > 0 && self.cofaces[self.dim - 1].iter().all(|c| c.len() == 2)
    }

    /// True when no two simplices of the same degree share a vertex set.
    pub fn is_simplicial(&self) -> bool {
        self.simplices.iter().all(|level| {
            let sets: BTreeSet<Vec<usize>> = level
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.sort_unstable();
                    s
                })
                .collect();
            sets.len() == level.len()
        })
    }

    /// Index of the face of top-level simplex `(k, i)` spanned by the local
    /// vertex positions in `mask` (bit `j` = `j`-th vertex in stored order).
    pub fn face_by_mask(&self, k: usize, i: usize, mask: u32) -> SimplexRef {
        debug_assert!(mask != 0 && mask < (1 << (k + 1)));
        let mut degree = k;
        let mut index = i;
        let mut m = mask;
        // drop missing positions from the highest down so lower positions stay valid
        for j in (0..=k).rev() {
            if m & (1 << j) == 0 {
                index = self.faces[degree][index][j];
                degree -= 1;
                // positions above j shift down by one
                let low = m & ((1 << j) - 1);
                let high = (m >> (j + 1)) << j;
                m = low | high;
            }
        }
        SimplexRef { degree, index }
    }

    /// Edge index joining local positions `a < b` of top simplex `t`.
    pub fn local_edge(&self, t: usize, a: usize, b: usize) -> usize {
        self.face_by_mask(self.dim, t, (1 << a) | (1 << b)).index
    }

    /// Signed boundary matrix `∂_k : C_k → C_{k−1}`.
    pub fn boundary_matrix(&self, k: usize) -> Result<IncidenceMatrix> {
        if k == 0 || k > self.dim {
            return Err(Error::DegreeOutOfRange { degree: k, dim: self.dim });
        }
        let cols = self.faces[k]
            .iter()
            .map(|f| {
                f.iter()
                    .enumerate()
                    .map(|(j, &g)| (g, incidence_sign(j) as i64))
                    .collect()
            })
            .collect();
        Ok(IncidenceMatrix::from_columns(self.count(k - 1), cols))
    }

    /// Coboundary `d_{k} : C^k → C^{k+1}`, the transpose of `∂_{k+1}`.
    pub fn coboundary_matrix(&self, k: usize) -> Result<IncidenceMatrix> {
        if k >= self.dim {
            return Err(Error::DegreeOutOfRange { degree: k, dim: self.dim });
        }
        Ok(self.boundary_matrix(k + 1)?.transpose())
    }

    /// All simplices in the closed star of `(k, i)`: every face of every
    /// simplex containing it.
    pub fn closed_star(&self, k: usize, i: usize) -> BTreeSet<SimplexRef> {
        let mut containing: BTreeSet<SimplexRef> = BTreeSet::new();
        let mut frontier = vec![SimplexRef { degree: k, index: i }];
        while let Some(s) = frontier.pop() {
            if containing.insert(s) && s.degree < self.dim {
                for &c in &self.cofaces[s.degree][s.index] {
                    frontier.push(SimplexRef { degree: s.degree + 1, index: c });
                }
            }
        }
        let mut closed = BTreeSet::new();
        let mut stack: Vec<SimplexRef> = containing.into_iter().collect();
        while let Some(s) = stack.pop() {
            if closed.insert(s) && s.degree > 0 {
                for &f in &self.faces[s.degree][s.index] {
                    stack.push(SimplexRef { degree: s.degree - 1, index: f });
                }
            }
        }
        closed
    }

    /// Top simplices containing simplex `(k, i)`.
    pub fn top_cofaces(&self, k: usize, i: usize) -> Vec<usize> {
        let mut current: BTreeSet<usize> = BTreeSet::from([i]);
        for d in k..self.dim {
            current = current
                .iter()
                .flat_map(|&s| self.cofaces[d][s].iter().copied())
                .collect();
        }
        current.into_iter().collect()
    }

    /// Applies a vertex relabelling `perm[old] = new`, returning an isomorphic
    /// complex with its own lexicographic indexing. Only valid for simplicial
    /// complexes.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if !self.is_simplicial() {
            return Err(Error::NotSimplicial("relabelling needs vertex-set faces".into()));
        }
        let mut labels = vec![0; self.labels.len()];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = self.labels[old];
        }
        let tops: Vec<Vec<usize>> = self.simplices[self.dim]
            .iter()
            .map(|t| t.iter().map(|&v| perm[v]).collect())
            .collect();
        Self::from_top_simplices(self.dim, labels, &tops)
    }

    /// Index of the `k`-simplex with the given sorted vertex tuple, if the
    /// complex is simplicial in that degree.
    pub fn find(&self, k: usize, verts: &[usize]) -> Option<usize> {
        let level = self.simplices.get(k)?;
        let first = level.partition_point(|s| s.as_slice() < verts);
        (first < level.len() && level[first] == verts).then_some(first)
    }
}

/// `(−1)^j`.
pub fn incidence_sign(j: usize) -> i8 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Star bound `N`: the largest closed-star size over all simplices.
pub fn star_bound(k: &OrientedComplex) -> usize {
    // the closed star of a simplex is contained in that of any of its
    // vertices, so vertices realise the maximum
    (0..k.count(0))
        .map(|v| k.closed_star(0, v).len())
        .max()
        .unwrap_or(0)
}

/// A real chain or cochain of fixed degree, with coefficients indexed by the
/// simplices (or dual cells) of that degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl Chain {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Self {
        Self { degree, coeffs }
    }

    pub fn zeros(degree: usize, len: usize) -> Self {
        Self { degree, coeffs: vec![0.0; len] }
    }

    pub fn basis(degree: usize, len: usize, i: usize) -> Self {
        let mut c = Self::zeros(degree, len);
        c.coeffs[i] = 1.0;
        c
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Cochains share the representation of chains; the distinction is the
/// operators applied to them.
pub type Cochain = Chain;

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn boundary_of_tetrahedron() -> OrientedComplex {
        let tops = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
        OrientedComplex::from_top_simplices(2, vec![0, 1, 2, 3], &tops).unwrap()
    }

    #[test]
    fn boundary_of_an_edge() {
        let k = OrientedComplex::from_top_simplices(1, vec![0, 1], &[vec![0, 1]]).unwrap();
        let d = k.boundary_matrix(1).unwrap();
        assert_eq!(d.get(0, 0), -1);
        assert_eq!(d.get(1, 0), 1);
    }

    #[test]
    fn sphere_counts_and_orientation() {
        let k = boundary_of_tetrahedron();
        assert_eq!(k.f_vector(), vec![4, 6, 4]);
        assert_eq!(k.euler_characteristic(), 2);
        assert!(k.orientation().is_some());
        assert!(k.is_closed_pseudomanifold());
        let d1 = k.boundary_matrix(1).unwrap();
        let d2 = k.boundary_matrix(2).unwrap();
        assert!(d1.matmul(&d2).is_zero());
    }

    #[test]
    fn closed_star_counts_by_enumeration() {
        let k = boundary_of_tetrahedron();
        // brute force: a simplex is in the closed star of v iff it is a face
        // of some triangle containing v
        for v in 0..4 {
            let mut expect = BTreeSet::new();
            for t in 0..4 {
                if k.simplex(2, t).contains(&v) {
                    for deg in 0..=2 {
                        for (i, s) in k.simplices(deg).iter().enumerate() {
                            if s.iter().all(|x| k.simplex(2, t).contains(x)) {
                                expect.insert((deg, i));
                            }
                        }
                    }
                }
            }
            assert_eq!(k.closed_star(0, v).len(), expect.len());
            assert_eq!(expect.len(), 13);
        }
        assert_eq!(star_bound(&k), 13);
    }

    #[test]
    fn single_simplex_star_is_all_faces() {
        for n in 1..=4usize {
            let k = OrientedComplex::from_top_simplices(
                n,
                (0..=n as i64).collect(),
                &[(0..=n).collect()],
            )
            .unwrap();
            assert_eq!(star_bound(&k), (1 << (n + 1)) - 1);
        }
    }

    #[test]
    fn face_by_mask_matches_vertex_sets() {
        let k = OrientedComplex::from_top_simplices(3, vec![0, 1, 2, 3], &[vec![0, 1, 2, 3]]).unwrap();
        for mask in 1u32..16 {
            let r = k.face_by_mask(3, 0, mask);
            let verts: Vec<usize> = (0..4).filter(|j| mask & (1 << j) != 0).collect();
            assert_eq!(k.simplex(r.degree, r.index), verts.as_slice());
        }
    }

    #[test]
    fn incompatible_orientation_is_rejected() {
        let mut k = boundary_of_tetrahedron();
        let mut s = k.orientation().unwrap().to_vec();
        s[0] = -s[0];
        assert!(matches!(k.set_orientation(s), Err(Error::NotOrientable(_))));
    }

    #[test]
    fn degree_out_of_range() {
        let k = boundary_of_tetrahedron();
        assert!(matches!(k.boundary_matrix(0), Err(Error::DegreeOutOfRange { .. })));
        assert!(matches!(k.boundary_matrix(3), Err(Error::DegreeOutOfRange { .. })));
    }
}
