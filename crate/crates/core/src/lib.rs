//! Numerical laboratory for pseudoresources, EPFI pairs and canonical
//! quantum commitments at Hilbert-space dimension up to 64.
//!
//! Module map:
//! - [`linalg`]: states, distances, entropies, Helstrom measurement
//! - [`bounds`]: scalar continuity and amplification bounds
//! - [`resource`]: free-set oracles, relative entropy of resource, gap checks
//! - [`epfi`]: EPFI pairs and the constructions that produce them
//! - [`commitment`]: canonical commitments and the optimal opening attack
//! - [`locc`]: round-based LOCC simulation and distillation certificates
//! - [`instances`]: reference constructions with known gaps

// `!(x > 0.0)` style guards are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod commitment;
pub mod epfi;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod locc;
pub mod resource;

pub use error::{Error, Result};

// Cross-module property tests. Kept in the lib target so they run ahead of
// the acceptance harness under a fail-fast `cargo test`.
#[cfg(test)]
mod properties {
    mod bounds;
    mod linalg;
    mod protocols;
}
