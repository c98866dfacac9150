//! Linear independent component analysis over prime fields.
//!
//! Given the joint distribution of a random vector `X` over GF(q)^d, the
//! crate looks for an invertible matrix `W` such that the components of
//! `Y = W X` are as independent as possible, i.e. such that the sum of
//! marginal entropies `sum_j H(Y_j)` is minimal. It provides
//!
//! * [`gf`]: field arithmetic, rank, inversion, incremental bases;
//! * [`pmf`]: joint distributions, entropies of every linear combination
//!   (Walsh-Hadamard and character-transform fast paths), samplers;
//! * [`ica`]: the linear lower bound, greedy and block-greedy searches, the
//!   order-permutation baseline and an exhaustive oracle;
//! * [`coding`]: component-wise arithmetic coding of decorrelated samples;
//! * [`experiments`] and [`verify`]: reproducible experiment drivers and the
//!   statistical acceptance checks.

pub mod coding;
mod error;
pub mod experiments;
pub mod gf;
pub mod ica;
pub mod pmf;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use gf::{Basis, Elem, FieldMatrix, FieldVector, PrimeField};
pub use pmf::{Capacity, JointPMF, MarginalDistribution, SampleSet};
