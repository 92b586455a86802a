//! Projective joint spectra of matrix tuples.
//!
//! Given matrices `A_1..A_n`, the joint spectrum is the hypersurface
//! `det(x_1 A_1 + ... + x_n A_n - x_{n+1} I) = 0` in projective space. This
//! crate computes that hypersurface, splits it into irreducible components by
//! eigenvalue monodromy, builds functional-calculus projections attached to
//! subsets of components, and tests which subsets certify a common invariant
//! subspace of the tuple.

pub mod criteria;
pub mod decomposition;
pub mod error;
pub mod exec;
pub mod io;
pub mod matrix;
pub mod numf;
pub mod pencil;
pub mod poly;
pub mod projections;
pub mod scalar;

pub use error::{Error, Result};
