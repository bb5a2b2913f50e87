//! Random walks on finite Abelian groups driven by doubly stochastic matrices
//! in Birkhoff subpolytopes.
//!
//! A step law `p` on a group `G` (the cyclic group `Z(d)` or the product
//! `Z(d) x Z(d)`) gives the transition matrix `P = sum_r p(g_r) M(r)`, a convex
//! combination of the permutation matrices of the regular representation.
//! Such matrices form the subpolytope `B(G)` of the Birkhoff polytope. The
//! crate evolves walks `q^(n) = q^(0) P^n`, computes their spectra through
//! group characters, tracks how the state spreads (Lorenz values,
//! majorization, Gini index, entropy, total variation to uniform), and
//! follows the polytopes `A[q^(n); B(G)]` as they shrink toward the uniform
//! vector.
//!
//! The [`quantum`] module realizes the same walks physically: repeated
//! non-selective position measurements interleaved with random shifts give a
//! walk on `Z(d)`, and coherent-state POVM measurements interleaved with
//! random displacements give a walk on `Z(d) x Z(d)`.
//!
//! ```
//! use abelian_walk::{birkhoff, measures, GroupSpec, ProbabilityVector, StepDistribution};
//!
//! let z5 = GroupSpec::cyclic(5)?;
//! let p = StepDistribution::from_weights(z5, vec![0.5, 0.5, 0.0, 0.0, 0.0])?;
//! let matrix = birkhoff::transition_matrix(z5, &p)?;
//! let q8 = birkhoff::evolve(&ProbabilityVector::delta(5, 0)?, &matrix, 8)?;
//! assert!((measures::entropy(&q8) - 1.575).abs() < 1e-3);
//! # Ok::<(), abelian_walk::WalkError>(())
//! ```

// Validation uses `!(x > 0.0)` style checks so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birkhoff;
pub mod error;
pub mod group;
mod linalg;
pub mod measures;
pub mod polytope;
pub mod quantum;
mod simplex;

pub use birkhoff::{
    Normalization, ProbabilityVector, Spectrum, StepDistribution, TransitionMatrix,
};
pub use error::{Result, WalkError};
pub use group::{GroupElement, GroupKind, GroupSpec, PermutationMatrix};
pub use measures::LorenzProfile;
pub use polytope::ProbPolytope;
