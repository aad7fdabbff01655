use num_bigint::BigInt;
use proptest::prelude::*;

use scl_hodge::complex::io::{parse_complex, write_complex};
use scl_hodge::complex::library::tetrahedron_boundary;
use scl_hodge::geometry::torus_mesh;
use scl_hodge::growth::{apply_f, bounds_both_sides, decay_curve, decay_rate, growth_rate, DecayConstants, VectorNorm};
use scl_hodge::isoperimetry::{cycle_to_loops, fill_norm, LpMode};
use scl_hodge::complex::Chain;
use scl_hodge::whitney::{WhitneyOptions, WhitneyStructure};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn planes_are_invariant(x in -1000i64..1000, y in -1000i64..1000) {
        let u = apply_f(&[x, y, 0, 0], 1);
        prop_assert!(u[2] == BigInt::ZERO && u[3] == BigInt::ZERO);
        let v = apply_f(&[0, 0, x, y], 1);
        prop_assert!(v[0] == BigInt::ZERO && v[1] == BigInt::ZERO);
    }
}

proptest! {
    #[test]
    fn only_zero_bounds_on_both_sides(a in prop::array::uniform4(-5i64..5)) {
        prop_assert_eq!(bounds_both_sides(&a), a == [0; 4]);
    }

    #[test]
    fn growth_rate_does_not_depend_on_the_norm(a in prop::array::uniform4(-20i64..20)) {
        prop_assume!(a != [0; 4]);
        let limit = (3.0 + 5f64.sqrt()) / 2.0;
        for which in [VectorNorm::L1, VectorNorm::L2, VectorNorm::LInf] {
            let r = growth_rate(&a, 30, which).unwrap();
            prop_assert!((r.ratios.last().unwrap() - limit).abs() < 1e-6);
        }
    }

    #[test]
    fn sphere_fill_is_integral_on_integer_boundaries(a in prop::array::uniform4(-3i64..=3)) {
        let (k, _) = tetrahedron_boundary();
        let coeffs: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let z = k.boundary_matrix(2).unwrap().mul_vec(&coeffs);
        let f = fill_norm(&k, &Chain::new(1, z.clone()), LpMode::Rational).unwrap();
        prop_assert!(f.exact_value.unwrap().is_integer());
        let dec = cycle_to_loops(&k, &Chain::new(1, z.clone())).unwrap();
        let m = dec.multiset(k.count(1));
        prop_assert!(m.iter().zip(&z).all(|(x, y)| *x as f64 == *y));
    }
}

#[test]
fn first_columns() {
    assert_eq!(apply_f(&[1, 0, 0, 0], 1), [2, 1, 0, 0].map(BigInt::from));
    assert_eq!(apply_f(&[0, 0, 1, 0], 1), [0, 0, 1, -1].map(BigInt::from));
    let r = growth_rate(&[0, 0, 1, 0], 30, VectorNorm::L2).unwrap();
    assert!((r.ratios[29] - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-6);
}

#[test]
fn iterates_grow_monotonically() {
    let r = growth_rate(&[1, 0, 0, 0], 60, VectorNorm::L2).unwrap();
    assert!(r.norms.windows(2).all(|w| w[1] >= w[0]));
    assert!(r.ratios.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    assert!((r.fitted_rate - decay_rate()).abs() < 1e-9);
}

#[test]
fn decay_bound_decreases_past_the_peak() {
    let c = decay_curve(1..=30, DecayConstants::default()).unwrap();
    let start = (1.0 / decay_rate()).ceil() as usize;
    assert!(c.rows[start - 1..].windows(2).all(|w| w[1].bound < w[0].bound));
    assert!((decay_rate() - 0.9624236501192069).abs() < 1e-15);
}

#[test]
fn text_format_round_trip() {
    let t = torus_mesh(3, 2, 0.5).unwrap();
    let text = write_complex(&t.complex, &t.metric).unwrap();
    let (k, m) = parse_complex(&text).unwrap();
    assert_eq!(k.f_vector(), t.complex.f_vector());
    assert_eq!(write_complex(&k, &m).unwrap(), text);
}

#[test]
fn codifferential_is_the_adjoint() {
    let t = torus_mesh(4, 2, 0.25).unwrap();
    let w = WhitneyStructure::assemble(&t.complex, &t.metric, WhitneyOptions::default()).unwrap();
    let f: Vec<f64> = (0..w.count(0)).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
    let g: Vec<f64> = (0..w.count(1)).map(|i| ((i * 13 % 7) as f64 - 3.0) / 5.0).collect();
    let df = w.apply_d(0, &f).unwrap();
    let lhs = w.inner(1, &df, &g).unwrap();
    let mg = w.mass(1).unwrap().mul_vec(&g);
    let dt = w.coboundary(0).unwrap().tr_mul_vec(&mg);
    let star = w.mass_solve(0, &dt).unwrap();
    let rhs = w.inner(0, &f, &star).unwrap();
    assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
}
