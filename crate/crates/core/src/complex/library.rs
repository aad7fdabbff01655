//! Small fixed complexes used by tests, examples and the CLI.

use super::OrientedComplex;
use crate::geometry::{Curvature, MetricData};

/// One flat equilateral triangle with unit edges.
pub fn triangle() -> (OrientedComplex, MetricData) {
    let k = OrientedComplex::from_top_simplices(2, vec![0, 1, 2], &[vec![0, 1, 2]])
        .expect("fixed input");
    let m = MetricData::new(Curvature::Flat, vec![1.0; k.count(1)]);
    (k, m)
}

/// The boundary of the tetrahedron with unit flat edges, a triangulated 2-sphere.
pub fn tetrahedron_boundary() -> (OrientedComplex, MetricData) {
    let tops = [vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
    let k = OrientedComplex::from_top_simplices(2, vec![0, 1, 2, 3], &tops).expect("fixed input");
    let m = MetricData::new(Curvature::Flat, vec![1.0; k.count(1)]);
    (k, m)
}
