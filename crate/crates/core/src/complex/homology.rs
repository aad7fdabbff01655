//! Exact rational rank of integer matrices and the Betti numbers built on it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::incidence::IncidenceMatrix;
use super::OrientedComplex;

type SparseRow<T> = Vec<(usize, T)>;

/// Rank over ℚ by fraction-free sparse elimination.
///
/// Rows are reduced against pivots keyed by their leading column. Entries are
/// kept primitive (content divided out) so boundary matrices stay tiny; if
/// an `i128` overflow is ever hit the whole computation is redone with
/// big integers.
pub fn exact_rank(m: &IncidenceMatrix) -> usize {
    // Work on the transpose's columns = original rows? Either way rank is
    // the same; eliminate the columns of `m` as vectors indexed by row.
    match rank_i128(m) {
        Some(r) => r,
        None => rank_bigint(m),
    }
}

fn rank_i128(m: &IncidenceMatrix) -> Option<usize> {
    let mut pivots: BTreeMap<usize, SparseRow<i128>> = BTreeMap::new();
    for col in m.columns() {
        let mut v: SparseRow<i128> = col.iter().map(|&(i, x)| (i, x as i128)).collect();
        loop {
            let Some(&(lead, a)) = v.first() else { break };
            match pivots.get(&lead) {
                None => {
                    pivots.insert(lead, v);
                    break;
                }
                Some(p) => {
                    let b = p[0].1;
                    let g = a.gcd(&b);
                    let (sa, sb) = (b / g, a / g);
                    v = combine_i128(&v, sa, p, sb)?;
                    normalize_i128(&mut v);
                }
            }
        }
    }
    Some(pivots.len())
}

/// `sa·v − sb·p`, with the leading entry cancelling.
fn combine_i128(
    v: &SparseRow<i128>,
    sa: i128,
    p: &SparseRow<i128>,
    sb: i128,
) -> Option<SparseRow<i128>> {
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < p.len() {
        let take_v = j >= p.len() || (i < v.len() && v[i].0 < p[j].0);
        let take_p = i >= v.len() || (j < p.len() && p[j].0 < v[i].0);
        let (idx, val) = if take_v {
            let r = (v[i].0, v[i].1.checked_mul(sa)?);
            i += 1;
            r
        } else if take_p {
            let r = (p[j].0, p[j].1.checked_mul(sb)?.checked_neg()?);
            j += 1;
            r
        } else {
            let x = v[i].1.checked_mul(sa)?;
            let y = p[j].1.checked_mul(sb)?;
            let r = (v[i].0, x.checked_sub(y)?);
            i += 1;
            j += 1;
            r
        };
        if val != 0 {
            out.push((idx, val));
        }
    }
    Some(out)
}

fn normalize_i128(v: &mut SparseRow<i128>) {
    let g = v.iter().fold(0i128, |g, e| g.gcd(&e.1));
    if g > 1 {
        for e in v.iter_mut() {
            e.1 /= g;
        }
    }
}

fn rank_bigint(m: &IncidenceMatrix) -> usize {
    let mut pivots: BTreeMap<usize, SparseRow<BigInt>> = BTreeMap::new();
    for col in m.columns() {
        let mut v: SparseRow<BigInt> = col.iter().map(|&(i, x)| (i, BigInt::from(x))).collect();
        loop {
            let Some((lead, a)) = v.first().cloned() else { break };
            match pivots.get(&lead) {
                None => {
                    pivots.insert(lead, v);
                    break;
                }
                Some(p) => {
                    let b = p[0].1.clone();
                    let g = a.gcd(&b);
                    let (sa, sb) = (&b / &g, &a / &g);
                    let mut out = Vec::with_capacity(v.len() + p.len());
                    let (mut i, mut j) = (0, 0);
                    while i < v.len() || j < p.len() {
                        let (idx, val) = if j >= p.len() || (i < v.len() && v[i].0 < p[j].0) {
                            i += 1;
                            (v[i - 1].0, &v[i - 1].1 * &sa)
                        } else if i >= v.len() || p[j].0 < v[i].0 {
                            j += 1;
                            (p[j - 1].0, -(&p[j - 1].1 * &sb))
                        } else {
                            i += 1;
                            j += 1;
                            (v[i - 1].0, &v[i - 1].1 * &sa - &p[j - 1].1 * &sb)
                        };
                        if !val.is_zero() {
                            out.push((idx, val));
                        }
                    }
                    let g = out
                        .iter()
                        .fold(BigInt::zero(), |g, e| g.gcd(&e.1));
                    if g.abs() > BigInt::from(1) {
                        for e in out.iter_mut() {
                            e.1 = &e.1 / &g;
                        }
                    }
                    v = out;
                }
            }
        }
    }
    pivots.len()
}

/// Ranks of every boundary operator `∂_k`, `k = 1..=n`, indexed by `k`
/// (entry 0 is zero).
pub fn boundary_ranks(k: &OrientedComplex) -> Vec<usize> {
    let mut ranks = vec![0; k.dim() + 2];
    for d in 1..=k.dim() {
        ranks[d] = exact_rank(&k.boundary_matrix(d).expect("degree in range"));
    }
    ranks
}

/// Betti numbers over ℚ from exact boundary ranks.
pub fn betti_numbers(k: &OrientedComplex) -> Vec<usize> {
    let ranks = boundary_ranks(k);
    (0..=k.dim())
        .map(|d| k.count(d) - ranks[d] - ranks[d + 1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        let m = IncidenceMatrix::from_columns(3, vec![vec![(0, 1), (1, -1)], vec![(1, 1), (2, -1)], vec![(0, 1), (2, -1)]]);
        assert_eq!(exact_rank(&m), 2);
        let z = IncidenceMatrix::zeros(4, 5);
        assert_eq!(exact_rank(&z), 0);
        let id = IncidenceMatrix::from_columns(3, (0..3).map(|i| vec![(i, 2)]).collect());
        assert_eq!(exact_rank(&id), 3);
    }

    #[test]
    fn bigint_path_agrees() {
        let m = IncidenceMatrix::from_columns(
            4,
            vec![
                vec![(0, 3), (1, 5), (3, 7)],
                vec![(0, 2), (2, 9)],
                vec![(1, 4), (2, -1), (3, 6)],
                vec![(0, 5), (1, 5), (2, 9), (3, 7)],
            ],
        );
        assert_eq!(rank_i128(&m), Some(rank_bigint(&m)));
        assert_eq!(rank_bigint(&m), 3);
    }
}
