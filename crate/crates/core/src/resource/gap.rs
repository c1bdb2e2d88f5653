//! Certified resource gaps between two keyed families.

use std::sync::Arc;

use rayon::prelude::*;

use super::{relative_entropy_of_resource, Bracket, FreeSetOracle, KeyedEnsemble};
use crate::bounds::BoundReport;
use crate::error::{Error, Result};

/// Per-side key count above which the exhaustive gap check refuses to run.
pub const MAX_GAP_KEYS: usize = 1 << 10;

/// Two keyed families with a claimed resource gap `η`.
#[derive(Debug, Clone)]
pub struct PseudoresourcePair {
    pub left: KeyedEnsemble,
    pub right: KeyedEnsemble,
    pub oracle: Arc<dyn FreeSetOracle>,
    pub claimed_eta: f64,
}

impl PseudoresourcePair {
    pub fn new(
        left: KeyedEnsemble,
        right: KeyedEnsemble,
        oracle: Arc<dyn FreeSetOracle>,
        claimed_eta: f64,
    ) -> Result<Self> {
        if left.dims() != right.dims() {
            return Err(Error::InvalidEnsemble(format!(
                "left dims {:?} differ from right dims {:?}",
                left.dims(),
                right.dims()
            )));
        }
        if left.dim() != oracle.dim() {
            return Err(Error::DimensionMismatch {
                expected: oracle.dim(),
                found: left.dim(),
            });
        }
        if !(claimed_eta > 0.0) {
            return Err(Error::OutOfRange(format!(
                "claimed eta {claimed_eta} must be positive"
            )));
        }
        Ok(PseudoresourcePair {
            left,
            right,
            oracle,
            claimed_eta,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapOutcome {
    /// Every cross pair is certified to differ by at least `η`.
    Satisfied,
    /// Some cross pair certainly differs by less than `η`.
    Violated,
    /// Brackets too wide to decide.
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct GapCertificate {
    /// `min_{k,k'} max(0, certified lower bound on |R(ψ_k) − R(φ_k')|)`.
    pub min_gap_lower: f64,
    /// `min_{k,k'}` of the largest difference the brackets allow.
    pub min_gap_upper: f64,
    /// Keys of the pair attaining `min_gap_lower`.
    pub worst_pair: (u64, u64),
    pub left_brackets: Vec<(u64, Bracket)>,
    pub right_brackets: Vec<(u64, Bracket)>,
    pub report: BoundReport,
    pub outcome: GapOutcome,
}

fn brackets(e: &KeyedEnsemble, oracle: &dyn FreeSetOracle) -> Result<Vec<(u64, Bracket)>> {
    e.entries()
        .par_iter()
        .map(|(k, s)| Ok((*k, relative_entropy_of_resource(s.density(), oracle)?)))
        .collect()
}

/// Certified lower bound on `|x − y|` for `x ∈ a`, `y ∈ b`.
pub fn gap_lower(a: &Bracket, b: &Bracket) -> f64 {
    (a.lower - b.upper).max(b.lower - a.upper).max(0.0)
}

/// Largest `|x − y|` compatible with the brackets.
pub fn gap_upper(a: &Bracket, b: &Bracket) -> f64 {
    (a.upper - b.lower).max(b.upper - a.lower).max(0.0)
}

/// Checks the resource gap over every cross pair of keys.
pub fn verify_resource_gap(pair: &PseudoresourcePair) -> Result<GapCertificate> {
    for e in [&pair.left, &pair.right] {
        if e.len() > MAX_GAP_KEYS {
            return Err(Error::DimensionBlowup {
                what: "keys per side".into(),
                dim: e.len(),
                limit: MAX_GAP_KEYS,
            });
        }
    }
    let oracle = pair.oracle.as_ref();
    let lb = brackets(&pair.left, oracle)?;
    let rb = brackets(&pair.right, oracle)?;
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    let mut worst = (0, 0);
    for (k, a) in &lb {
        for (k2, b) in &rb {
            let lo = gap_lower(a, b);
            if lo < min_lower {
                min_lower = lo;
                worst = (*k, *k2);
            }
            min_upper = min_upper.min(gap_upper(a, b));
        }
    }
    let eta = pair.claimed_eta;
    let report = BoundReport::new("resource_gap", eta, min_lower);
    let outcome = if report.satisfied {
        GapOutcome::Satisfied
    } else if min_upper + crate::bounds::BOUND_TOL < eta {
        GapOutcome::Violated
    } else {
        GapOutcome::Indeterminate
    };
    Ok(GapCertificate {
        min_gap_lower: min_lower,
        min_gap_upper: min_upper,
        worst_pair: worst,
        left_brackets: lb,
        right_brackets: rb,
        report,
        outcome,
    })
}
