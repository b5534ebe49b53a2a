//! Parameterized arithmetic circuits over exact rationals.
//!
//! The crate is `no_std` and only needs an allocator. It provides:
//!
//! - [`algebra`]: exact rationals, sparse multivariate polynomials, rational
//!   functions and small exact matrices (rank, characteristic polynomial).
//! - [`circuit`]: the labelled DAG with parameter and input leaves, node
//!   classification and the non-scalar (Ostrowski) cost measure.
//! - [`semantics`]: node-by-node symbolic interpretation, restriction of
//!   parameters, numeric evaluation and coefficient maps.
//! - [`transforms`]: reduction, join and broadcasting.
//! - [`identity`]: exact and modular identity testing plus the sizes of
//!   deterministic test-point sets.
//! - [`arithmetize`]: Boolean circuits, the standard arithmetization and
//!   satisfiability counting through elimination polynomials.
//! - [`elim`]: the flat elimination families, two independent elimination
//!   oracles and the rank/independence witnesses.
//! - [`pochhammer`]: generation and randomized verification of falling
//!   factorial circuit chains.

#![no_std]

extern crate alloc;

pub mod algebra;
pub mod arithmetize;
pub mod circuit;
pub mod elim;
mod error;
pub mod identity;
pub mod modular;
pub mod pochhammer;
pub mod random;
pub mod semantics;
pub mod transforms;

pub use error::{Error, Result};

/// Default cap on the number of stored terms of any intermediate value.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;
