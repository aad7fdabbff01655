//! Filling norms by linear programming, `scl` upper bounds, cellular
//! approximation of torus geodesics, the attained duality of exact chains,
//! Euclidean harmonic chains, loop assembly and the inequality chain behind
//! the spectral gap bound for 3-manifolds.

mod diameter;
mod fill;
mod geodesic;
mod harmonic;
mod lemma;
mod loops;
mod lp;
mod theorem_a;

pub use diameter::{complex_volume, graph_diameter, DiameterReport};
pub use fill::{fill_norm, fill_norm_dual, fill_with, scl_upper, CellWeights, FillCertificate, LpMode, RATIONAL_LIMIT};
pub use geodesic::{geodesic_to_cellular, rectangle, trace_polygon, CellularPath, Geodesic};
pub use harmonic::{euclidean_project, harmonic_chains, EuclideanSplit, HarmonicChainBasis, HARMONIC_TOL};
pub use lemma::{lemma41_check, DualityWitness, COEXACT_TOL};
pub use loops::{based_loop, cycle_to_loops, cycle_to_loops_with, rationalize, EdgeLoop, LoopDecomposition, MAX_DENOMINATOR};
pub use theorem_a::{
    theorem_a_verify, ChainStep, MeasuredConstants, Relation, TheoremAReport, TheoremAVerifier, STEP_TOL,
};
