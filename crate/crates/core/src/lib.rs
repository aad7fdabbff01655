//! Discrete Hodge theory on geometric simplicial complexes.
//!
//! Whitney forms and their mass matrices, the cochain Laplacian and its
//! coexact spectral gap, dual celluations and Poincaré duality, filling
//! norms by linear programming, stable commutator length bounds, Euclidean
//! harmonic chains, and the symplectic growth engine used for spectral gap
//! decay estimates.

pub mod complex;
pub mod error;
pub mod geometry;
pub mod growth;
pub mod isoperimetry;
pub mod linalg;
pub mod norms;
pub mod whitney;

pub use error::{Error, Result};
