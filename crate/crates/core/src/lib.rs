//! Iterated random orthogonal projections of convex polytopes.
//!
//! The crate simulates the chain `K0 -> K1 -> ... -> Km`, where each step
//! projects the current body onto the complement of a fresh direction drawn
//! uniformly from the remaining subspace, and evaluates information
//! quantities of that chain:
//!
//! * [`geometry`]: polytopes, shadows, nearest points, Hausdorff distance,
//!   congruence and symmetry groups,
//! * [`sampling`]: seeded substreams, sphere and Grassmannian sampling,
//!   direction chains,
//! * [`estimators`]: subspace-ambiguity fractions, the information bound,
//!   plug-in mutual information and the data-processing check,
//! * [`strata`]: stabilizers, orbits and the stratification of `G_{n,2}`,
//! * [`bodies`]: the built-in body generators.

pub mod bodies;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod linalg;
pub mod parallel;
pub mod sampling;
pub mod strata;

pub use error::{Error, Result};
