//! Resource theories as free-set oracles and the relative entropy of
//! resource `R(ρ) = min_{σ ∈ F} D(ρ‖σ)`.

mod coherence;
mod ensemble;
mod gap;
mod separable;

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{relative_entropy, CMatrix, CVector, DensityMatrix};

pub use coherence::CoherenceOracle;
pub use ensemble::{format_key, parse_key, KeyedEnsemble, MAX_KEY_LEN};
pub use gap::{
    gap_lower, gap_upper, verify_resource_gap, GapCertificate, GapOutcome, PseudoresourcePair,
    MAX_GAP_KEYS,
};
pub use separable::{
    ppt_dual_bound, ProductTerm, SeesawConfig, SeparabilityOracle, MAX_SEPARABLE_DIM,
};

/// Whether a state is known to lie in the free set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Free,
    NotFree,
    Unknown,
}

/// A certified member of the free set, in a form the oracle can re-check.
#[derive(Debug, Clone, PartialEq)]
pub enum FreeWitness {
    /// Diagonal in the computational basis.
    Diagonal(DensityMatrix),
    /// Explicit convex mixture of product vectors `a ⊗ b`.
    Product {
        d_a: usize,
        d_b: usize,
        terms: Vec<ProductTerm>,
    },
    /// PPT state in a dimension where PPT implies separable (2x2, 2x3).
    LowDimPpt {
        d_a: usize,
        d_b: usize,
        state: DensityMatrix,
    },
}

impl FreeWitness {
    pub fn state(&self) -> DensityMatrix {
        match self {
            FreeWitness::Diagonal(s) | FreeWitness::LowDimPpt { state: s, .. } => s.clone(),
            FreeWitness::Product { terms, .. } => separable::assemble(terms),
        }
    }

    /// Re-checks membership from the witness data alone.
    pub fn verify(&self) -> bool {
        match self {
            FreeWitness::Diagonal(s) => {
                let m = s.matrix();
                (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() <= 1e-10))
            }
            FreeWitness::Product { d_a, d_b, terms } => {
                let total: f64 = terms.iter().map(|t| t.weight).sum();
                !terms.is_empty()
                    && (total - 1.0).abs() <= 1e-9
                    && terms.iter().all(|t| {
                        t.weight >= 0.0
                            && t.a.len() == *d_a
                            && t.b.len() == *d_b
                            && (t.a.norm() - 1.0).abs() <= 1e-9
                            && (t.b.norm() - 1.0).abs() <= 1e-9
                    })
            }
            FreeWitness::LowDimPpt { d_a, d_b, state } => {
                d_a * d_b <= 6
                    && crate::linalg::BipartiteState::mixed(state.clone(), *d_a, *d_b)
                        .map(|b| b.ppt_min_eigenvalue() >= -1e-10)
                        .unwrap_or(false)
            }
        }
    }
}

/// Two-sided bound `lower ≤ min_{σ∈F} D(ρ‖σ) ≤ upper`, in bits.
///
/// `upper` is attained by the free state in `witness`. `converged` is false
/// when an iteration limit was hit; the bracket is still valid but may be
/// wider than requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub witness: FreeWitness,
    pub converged: bool,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower - tol <= x && x <= self.upper + tol
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6}, {:.6}]", self.lower, self.upper)
    }
}

/// A convex, closed set of free states containing a full-rank state.
pub trait FreeSetOracle: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Bracket on `min_{σ∈F} D(ρ‖σ)`.
    fn closest_free(&self, rho: &DensityMatrix) -> Result<Bracket>;

    /// Upper bound on `sup_τ R(τ) − inf_τ R(τ)`.
    fn diameter_kappa(&self) -> f64;

    fn full_rank_witness(&self) -> DensityMatrix;

    fn contains(&self, rho: &DensityMatrix) -> Membership;
}

/// Certified bracket on the relative entropy of resource of `rho`.
///
/// The oracle's witness is re-verified as a free state and its relative
/// entropy recomputed; a witness that fails either check is an error.
pub fn relative_entropy_of_resource(
    rho: &DensityMatrix,
    oracle: &dyn FreeSetOracle,
) -> Result<Bracket> {
    if rho.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            found: rho.dim(),
        });
    }
    let b = oracle.closest_free(rho)?;
    if !b.witness.verify() {
        return Err(Error::Indeterminate(format!(
            "{}: free-state witness failed verification",
            oracle.name()
        )));
    }
    let at_witness = relative_entropy(rho, &b.witness.state())?;
    if !(at_witness <= b.upper + 1e-7) {
        return Err(Error::Indeterminate(format!(
            "{}: witness gives D = {at_witness}, above reported upper {}",
            oracle.name(),
            b.upper
        )));
    }
    if !(b.lower <= b.upper) {
        return Err(Error::Indeterminate(format!(
            "{}: inverted bracket {b}",
            oracle.name()
        )));
    }
    Ok(b)
}

pub(crate) fn product_vector(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub(crate) fn outer(x: &CVector) -> CMatrix {
    x * x.adjoint()
}
