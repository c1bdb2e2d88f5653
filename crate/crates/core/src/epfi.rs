//! EPFI pairs: two keyed families whose every cross pair is far in trace
//! distance. Constructors turn certified resource or entanglement gaps into a
//! concrete distance `δ`; the exhaustive checks confirm it.
//!
//! Indistinguishability of the key-averaged families is only measured
//! statistically here ([`statistical_hiding_advantage`]). A small value is
//! necessary for computational indistinguishability, not sufficient.

use rayon::prelude::*;

use crate::bounds::{BoundReport, BOUND_TOL, FANNES_CAP};
use crate::error::{Error, Result};
use crate::linalg::{
    tensor, trace_distance, BipartiteState, CMatrix, DensityMatrix, PureState, Side,
};
use crate::resource::{
    gap_lower, gap_upper, relative_entropy_of_resource, verify_resource_gap, Bracket, GapOutcome,
    KeyedEnsemble, PseudoresourcePair, SeparabilityOracle, MAX_SEPARABLE_DIM,
};

/// Cross pairs above this count are not swept.
pub const MAX_PAIRS: usize = 1 << 20;

/// Limit on `m·log₂ d` for the key-averaged tensor powers.
pub const MAX_POWER_QUBITS: f64 = 12.0;

/// Purity below `1 − PURITY_TOL` is treated as mixed.
pub const PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Explicit,
    FromPseudoresource,
    FromPurePe,
    FromMixedPe,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Explicit => "explicit",
            Provenance::FromPseudoresource => "from_pseudoresource",
            Provenance::FromPurePe => "from_pure_pe",
            Provenance::FromMixedPe => "from_mixed_pe",
        }
    }
}

/// Two keyed families with a certified lower bound on every cross-pair
/// trace distance.
#[derive(Debug, Clone)]
pub struct EpfiPair {
    pub left: KeyedEnsemble,
    pub right: KeyedEnsemble,
    pub certified_delta: f64,
    pub provenance: Provenance,
}

impl EpfiPair {
    pub fn explicit(
        left: KeyedEnsemble,
        right: KeyedEnsemble,
        certified_delta: f64,
    ) -> Result<Self> {
        Self::build(left, right, certified_delta, Provenance::Explicit)
    }

    fn build(
        left: KeyedEnsemble,
        right: KeyedEnsemble,
        certified_delta: f64,
        provenance: Provenance,
    ) -> Result<Self> {
        if left.dims() != right.dims() {
            return Err(Error::InvalidEnsemble(format!(
                "left dims {:?} differ from right dims {:?}",
                left.dims(),
                right.dims()
            )));
        }
        if !(0.0..=1.0).contains(&certified_delta) {
            return Err(Error::OutOfRange(format!(
                "certified delta {certified_delta} not in [0, 1]"
            )));
        }
        Ok(EpfiPair {
            left,
            right,
            certified_delta,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    pub fn pair_count(&self) -> usize {
        self.left.len() * self.right.len()
    }
}

/// Two families of pure bipartite states with a claimed entanglement-entropy
/// gap.
#[derive(Debug, Clone)]
pub struct PurePePair {
    pub left: KeyedEnsemble,
    pub right: KeyedEnsemble,
    pub claimed_eta: f64,
}

impl PurePePair {
    pub fn new(left: KeyedEnsemble, right: KeyedEnsemble, claimed_eta: f64) -> Result<Self> {
        if left.dims() != right.dims() {
            return Err(Error::InvalidEnsemble("left and right dims differ".into()));
        }
        for (side, e) in [("left", &left), ("right", &right)] {
            for (k, s) in e.iter() {
                let p = s.density().purity();
                if p < 1.0 - PURITY_TOL {
                    return Err(Error::InvalidEnsemble(format!(
                        "{side} state for key {k} is not pure (purity {p})"
                    )));
                }
            }
        }
        Ok(PurePePair {
            left,
            right,
            claimed_eta,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErProxy {
    /// `E_R(ρ)`.
    SingleCopy,
    /// `E_R(ρ⊗ρ)/2`, bipartition `A₁A₂ : B₁B₂`.
    TwoCopy,
}

/// Two families with a claimed gap in (regularised) relative entropy of
/// entanglement, measured through `er_proxy`.
#[derive(Debug, Clone)]
pub struct MixedPePair {
    pub left: KeyedEnsemble,
    pub right: KeyedEnsemble,
    pub claimed_eta: f64,
    pub er_proxy: ErProxy,
}

impl MixedPePair {
    pub fn new(
        left: KeyedEnsemble,
        right: KeyedEnsemble,
        claimed_eta: f64,
        er_proxy: ErProxy,
    ) -> Result<Self> {
        if left.dims() != right.dims() {
            return Err(Error::InvalidEnsemble("left and right dims differ".into()));
        }
        Ok(MixedPePair {
            left,
            right,
            claimed_eta,
            er_proxy,
        })
    }
}

/// `δ = (η − 2)/κ` from a certified resource gap `η > 2`.
pub fn from_pseudoresource(pair: &PseudoresourcePair) -> Result<EpfiPair> {
    let eta = pair.claimed_eta;
    if !(eta > 2.0) {
        return Err(Error::HypothesisViolated(format!(
            "resource gap {eta} must exceed 2"
        )));
    }
    let kappa = pair.oracle.diameter_kappa();
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::OutOfRange(format!(
            "diameter {kappa} must be finite and positive"
        )));
    }
    let cert = verify_resource_gap(pair)?;
    match cert.outcome {
        GapOutcome::Satisfied => {}
        GapOutcome::Violated => {
            return Err(Error::HypothesisViolated(format!(
                "certified gap at most {} < {eta}",
                cert.min_gap_upper
            )))
        }
        GapOutcome::Indeterminate => {
            return Err(Error::Indeterminate(format!(
                "gap bracketed in [{}, {}], claimed {eta}",
                cert.min_gap_lower, cert.min_gap_upper
            )))
        }
    }
    let delta = ((eta - 2.0) / kappa).min(1.0);
    EpfiPair::build(
        pair.left.clone(),
        pair.right.clone(),
        delta,
        Provenance::FromPseudoresource,
    )
}

fn reduced_family(e: &KeyedEnsemble) -> Result<KeyedEnsemble> {
    let (d_a, _) = e.dims();
    e.map(|_, s| BipartiteState::mixed(s.partial_trace(Side::A), d_a, 1))
}

/// Reduced states on A with `δ = (η − 1/(2e))/(2 log₂ dA)`.
pub fn from_pure_pseudoentanglement(pair: &PurePePair) -> Result<EpfiPair> {
    let eta = pair.claimed_eta;
    if !(eta > FANNES_CAP) {
        return Err(Error::HypothesisViolated(format!(
            "entropy gap {eta} must exceed 1/(2e)"
        )));
    }
    let (d_a, _) = pair.left.dims();
    if d_a < 2 {
        return Err(Error::OutOfRange(
            "subsystem A must have dimension at least 2".into(),
        ));
    }
    let entropies = |e: &KeyedEnsemble| {
        e.iter()
            .map(|(_, s)| s.entanglement_entropy())
            .collect::<Vec<_>>()
    };
    let (sl, sr) = (entropies(&pair.left), entropies(&pair.right));
    let min_gap = sl
        .iter()
        .flat_map(|a| sr.iter().map(move |b| (a - b).abs()))
        .fold(f64::INFINITY, f64::min);
    if min_gap + BOUND_TOL < eta {
        return Err(Error::HypothesisViolated(format!(
            "entanglement entropy gap {min_gap} is below the claimed {eta}"
        )));
    }
    let delta = ((eta - FANNES_CAP) / (2.0 * (d_a as f64).log2())).min(1.0);
    EpfiPair::build(
        reduced_family(&pair.left)?,
        reduced_family(&pair.right)?,
        delta,
        Provenance::FromPurePe,
    )
}

/// `ρ⊗ρ` on `A₁A₂ ⊗ B₁B₂`.
pub fn two_copy(state: &BipartiteState) -> Result<BipartiteState> {
    let (d_a, d_b) = state.dims();
    let m = tensor::kron(state.density().matrix(), state.density().matrix());
    let m = tensor::permute_subsystems(&m, &[d_a, d_b, d_a, d_b], &[0, 2, 1, 3])?;
    BipartiteState::mixed(DensityMatrix::from_numerical(m)?, d_a * d_a, d_b * d_b)
}

/// Bracket on the entanglement proxy of one state.
pub fn er_proxy_bracket(state: &BipartiteState, proxy: ErProxy) -> Result<Bracket> {
    let (d_a, d_b) = state.dims();
    match proxy {
        ErProxy::SingleCopy => {
            relative_entropy_of_resource(state.density(), &SeparabilityOracle::new(d_a, d_b)?)
        }
        ErProxy::TwoCopy => {
            let d = state.dim() * state.dim();
            if d > MAX_SEPARABLE_DIM {
                return Err(Error::DimensionBlowup {
                    what: "two-copy entanglement proxy".into(),
                    dim: d,
                    limit: MAX_SEPARABLE_DIM,
                });
            }
            let doubled = two_copy(state)?;
            let oracle = SeparabilityOracle::new(d_a * d_a, d_b * d_b)?;
            let b = relative_entropy_of_resource(doubled.density(), &oracle)?;
            Ok(Bracket {
                lower: b.lower / 2.0,
                upper: b.upper / 2.0,
                ..b
            })
        }
    }
}

/// Certified gap in the entanglement proxy, `δ = (η − 2)/log₂(dA dB)`.
pub fn from_mixed_pseudoentanglement(pair: &MixedPePair) -> Result<EpfiPair> {
    let eta = pair.claimed_eta;
    if !(eta > 2.0) {
        return Err(Error::HypothesisViolated(format!(
            "entanglement gap {eta} must exceed 2"
        )));
    }
    let brackets = |e: &KeyedEnsemble| -> Result<Vec<Bracket>> {
        e.entries()
            .par_iter()
            .map(|(_, s)| er_proxy_bracket(s, pair.er_proxy))
            .collect()
    };
    let (lb, rb) = (brackets(&pair.left)?, brackets(&pair.right)?);
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    for a in &lb {
        for b in &rb {
            min_lower = min_lower.min(gap_lower(a, b));
            min_upper = min_upper.min(gap_upper(a, b));
        }
    }
    if min_upper + BOUND_TOL < eta {
        return Err(Error::HypothesisViolated(format!(
            "entanglement gap at most {min_upper} < {eta}"
        )));
    }
    if min_lower + BOUND_TOL < eta {
        return Err(Error::Indeterminate(format!(
            "entanglement gap bracketed in [{min_lower}, {min_upper}], claimed {eta}"
        )));
    }
    let d = pair.left.dim() as f64;
    let delta = ((eta - 2.0) / d.log2()).min(1.0);
    EpfiPair::build(
        pair.left.clone(),
        pair.right.clone(),
        delta,
        Provenance::FromMixedPe,
    )
}

/// Exact minimum trace distance over all cross pairs, compared with the
/// certified δ.
pub fn verify_pairwise_far(pair: &EpfiPair) -> Result<(f64, BoundReport)> {
    let n = pair.pair_count();
    if n > MAX_PAIRS {
        return Err(Error::DimensionBlowup {
            what: "cross pairs".into(),
            dim: n,
            limit: MAX_PAIRS,
        });
    }
    let right = pair.right.entries();
    let min = pair
        .left
        .entries()
        .par_iter()
        .map(|(_, a)| {
            right
                .iter()
                .map(|(_, b)| trace_distance(a.density(), b.density()))
                .try_fold(f64::INFINITY, |m, d| d.map(|d| m.min(d)))
        })
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?;
    Ok((
        min,
        BoundReport::new("pairwise_far", pair.certified_delta, min),
    ))
}

fn power_mixture(e: &KeyedEnsemble, m: usize) -> Result<DensityMatrix> {
    let powers = e
        .entries()
        .par_iter()
        .map(|(_, s)| match s.pure_state() {
            Some(p) => p.tensor_power(m).density(),
            None => s.density().tensor_power(m),
        })
        .collect::<Vec<_>>();
    DensityMatrix::average(&powers)
}

/// `Δ(avg_k ψ_k^⊗m, avg_k' φ_k'^⊗m)`: the best advantage of an unbounded
/// distinguisher holding `m` copies and no key.
pub fn statistical_hiding_advantage(pair: &EpfiPair, m: usize) -> Result<f64> {
    let d = pair.dim();
    if m as f64 * (d as f64).log2() > MAX_POWER_QUBITS + 1e-12 {
        return Err(Error::DimensionBlowup {
            what: format!("{m} copies"),
            dim: d.saturating_pow(m as u32),
            limit: 1 << MAX_POWER_QUBITS as u32,
        });
    }
    trace_distance(
        &power_mixture(&pair.left, m)?,
        &power_mixture(&pair.right, m)?,
    )
}

/// `X^x Z^z` on each of `n` qubits, bits read from `key` MSB first as
/// `x₁ z₁ x₂ z₂ ..`.
pub fn keyed_pauli(key: u64, n: usize) -> CMatrix {
    let c = |r: f64| num_complex::Complex64::new(r, 0.0);
    let x = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
    let z = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let id = CMatrix::identity(2, 2);
    let mut out = CMatrix::identity(1, 1);
    for j in 0..n {
        let bit = |i: usize| (key >> (2 * n - 1 - i)) & 1 == 1;
        let xs = if bit(2 * j) { &x } else { &id };
        let zs = if bit(2 * j + 1) { &z } else { &id };
        out = tensor::kron(&out, &(xs * zs));
    }
    out
}

/// `(P_k ⊗ I) Φ^⊗n (P_k ⊗ I)†` over all `4^n` keys, on `2^n ⊗ 2^n`.
pub fn pauli_keyed_bell(n_pairs: usize) -> Result<KeyedEnsemble> {
    let d = 1usize << n_pairs;
    let phi = PureState::maximally_entangled(d);
    KeyedEnsemble::from_fn(2 * n_pairs, |k| {
        let u = tensor::kron(&keyed_pauli(k, n_pairs), &CMatrix::identity(d, d));
        BipartiteState::pure(phi.apply(&u)?, d, d)
    })
}

/// Pauli-keyed Bell pairs against the maximally mixed state: pairwise far,
/// yet with identical key averages.
pub fn pauli_bell_vs_mixed(n_pairs: usize) -> Result<EpfiPair> {
    let d = 1usize << n_pairs;
    let left = pauli_keyed_bell(n_pairs)?;
    let right = KeyedEnsemble::single(BipartiteState::mixed(
        DensityMatrix::maximally_mixed(d * d),
        d,
        d,
    )?);
    EpfiPair::explicit(left, right, 0.5)
}
