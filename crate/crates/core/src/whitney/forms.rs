//! Whitney forms on one top simplex in reference coordinates `ξ`.
//!
//! A `k`-covector is stored by its coefficients on `dξ_I` for increasing
//! `k`-subsets `I ⊂ {0, …, n−1}` in lexicographic order.

use nalgebra::DMatrix;

/// Increasing `k`-subsets of `{0, …, n−1}` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Local position masks of the `k`-faces of an `n`-simplex, ordered
/// lexicographically by their position lists.
pub fn face_masks(n: usize, k: usize) -> Vec<u32> {
    subsets(n + 1, k + 1)
        .into_iter()
        .map(|s| s.iter().fold(0u32, |m, &p| m | (1 << p)))
        .collect()
}

pub fn mask_positions(mask: u32) -> Vec<usize> {
    (0..32).filter(|p| mask & (1 << p) != 0).collect()
}

/// Determinant of a small square matrix given row-major.
pub fn small_det(a: &[f64], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => {
            let mut m = a.to_vec();
            let mut det = 1.0;
            for c in 0..k {
                let p = (c..k)
                    .max_by(|&i, &j| m[i * k + c].abs().total_cmp(&m[j * k + c].abs()))
                    .unwrap();
                if m[p * k + c] == 0.0 {
                    return 0.0;
                }
                if p != c {
                    for j in 0..k {
                        m.swap(p * k + j, c * k + j);
                    }
                    det = -det;
                }
                let piv = m[c * k + c];
                det *= piv;
                for i in c + 1..k {
                    let f = m[i * k + c] / piv;
                    for j in c..k {
                        m[i * k + j] -= f * m[c * k + j];
                    }
                }
            }
            det
        }
    }
}

/// Gradients of the barycentric coordinates in reference coordinates:
/// `db_0 = −Σ dξ_i`, `db_i = dξ_i`.
pub fn barycentric_gradients(n: usize) -> Vec<Vec<f64>> {
    let mut g = vec![vec![-1.0; n]];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        g.push(e);
    }
    g
}

/// Coefficients of `q! Σ_j (−1)^j b_{a_j} db_{a_0} ∧ … ∧ \widehat{db_{a_j}} ∧ … ∧ db_{a_q}`
/// for the face with local positions `face`, given coordinate values `b`
/// and their reference gradients.
pub fn whitney_coefficients(
    n: usize,
    face: &[usize],
    b: &[f64],
    grads: &[Vec<f64>],
    subsets_k: &[Vec<usize>],
) -> Vec<f64> {
    let k = face.len() - 1;
    if k == 0 {
        return vec![b[face[0]]];
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    let mut out = vec![0.0; subsets_k.len()];
    let mut buf = vec![0.0; k * k];
    for (j, &aj) in face.iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = fact * sign * b[aj];
        if coeff == 0.0 {
            continue;
        }
        for (s, idx) in subsets_k.iter().enumerate() {
            let mut r = 0;
            for (l, &al) in face.iter().enumerate() {
                if l == j {
                    continue;
                }
                for (c, &i) in idx.iter().enumerate() {
                    buf[r * k + c] = grads[al][i];
                }
                r += 1;
            }
            out[s] += coeff * small_det(&buf, k);
        }
    }
    debug_assert!(n >= k);
    out
}

/// Gram matrix of `k`-covectors induced by the inverse metric:
/// `G[I,J] = det(g⁻¹[I,J])`.
pub fn covector_gram(ginv: &DMatrix<f64>, subsets_k: &[Vec<usize>]) -> DMatrix<f64> {
    let m = subsets_k.len();
    let k = subsets_k.first().map_or(0, Vec::len);
    let mut g = DMatrix::zeros(m, m);
    let mut buf = vec![0.0; k * k];
    for (a, ia) in subsets_k.iter().enumerate() {
        for (b, ib) in subsets_k.iter().enumerate().skip(a) {
            for (r, &i) in ia.iter().enumerate() {
                for (c, &j) in ib.iter().enumerate() {
                    buf[r * k + c] = ginv[(i, j)];
                }
            }
            let v = small_det(&buf, k);
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    g
}

/// Value of a `k`-covector on `k` tangent vectors (columns of `v`, in `ξ`
/// coordinates).
pub fn evaluate_on_vectors(coeffs: &[f64], v: &[Vec<f64>], subsets_k: &[Vec<usize>]) -> f64 {
    let k = v.len();
    if k == 0 {
        return coeffs[0];
    }
    let mut buf = vec![0.0; k * k];
    let mut total = 0.0;
    for (s, idx) in subsets_k.iter().enumerate() {
        for (r, &i) in idx.iter().enumerate() {
            for (c, vc) in v.iter().enumerate() {
                buf[r * k + c] = vc[i];
            }
        }
        total += coeffs[s] * small_det(&buf, k);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(face_masks(2, 1), vec![0b011, 0b101, 0b110]);
    }

    #[test]
    fn determinants() {
        let a = [2.0, 1.0, 0.0, 0.0, 1.0, 3.0, 0.0, 0.0, 1.0, 0.0, 4.0, 0.0, 0.0, 2.0, 0.0, 5.0];
        let m = DMatrix::from_row_slice(4, 4, &a);
        assert!((small_det(&a, 4) - m.determinant()).abs() < 1e-12);
        let b = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0];
        assert!((small_det(&b, 3) - DMatrix::from_row_slice(3, 3, &b).determinant()).abs() < 1e-12);
    }

    #[test]
    fn top_form_is_constant() {
        // on a triangle the Whitney 2-form of the whole simplex is 2 dξ_1∧dξ_2
        let g = barycentric_gradients(2);
        let s = subsets(2, 2);
        for b in [[0.2, 0.3, 0.5], [1.0, 0.0, 0.0]] {
            let w = whitney_coefficients(2, &[0, 1, 2], &b, &g, &s);
            assert!((w[0] - 2.0).abs() < 1e-14);
        }
    }
}
