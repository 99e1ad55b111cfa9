//! Joint numerical ranges of Hermitian operators.
//!
//! The crate computes boundary points of `L(F_1, ..., F_k)`, the set of
//! expectation tuples `(Tr rho F_1, ..., Tr rho F_k)` over density matrices,
//! builds inner/outer polytope approximations, classifies qutrit ranges by
//! their flat boundary parts, and applies the machinery to thermal states,
//! separable states, spin-chain phase diagrams and variance-based
//! uncertainty bounds.

pub mod boundary;
pub mod classify;
pub mod cli;
pub mod error;
pub mod hermitian;
pub mod phase;
pub mod random;
pub mod separable;
pub mod spin;
pub mod thermal;
pub mod uncertainty;

pub use error::{JnrError, Result};
