//! Reference constructions with known gaps and distances, shared by the
//! verification suites.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::epfi::{pauli_keyed_bell, EpfiPair, PurePePair};
use crate::error::{Error, Result};
use crate::linalg::{
    c, shannon_entropy, BipartiteState, CMatrix, CVector, DensityMatrix, PureState,
};
use crate::resource::{CoherenceOracle, FreeSetOracle, KeyedEnsemble, PseudoresourcePair};

fn incoherent(d: usize, i: usize) -> BipartiteState {
    BipartiteState::pure(PureState::basis(d, i), d, 1).expect("basis state")
}

/// Uniform superposition over the first `support` of `d` levels with phases
/// `(−1)^{popcount(i & k)}`.
pub fn phased_uniform(d: usize, support: usize, k: u64) -> Result<PureState> {
    if support == 0 || support > d {
        return Err(Error::OutOfRange(format!(
            "support {support} must be 1..={d}"
        )));
    }
    let s = 1.0 / (support as f64).sqrt();
    let amps = (0..d as u64).map(|i| {
        let sign = if (i & k).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        if (i as usize) < support {
            c(sign * s, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    PureState::new(CVector::from_iterator(d, amps))
}

/// Incoherent basis states against phased uniform superpositions on
/// `support` levels; the coherence gap is exactly `log₂ support`.
pub fn coherence_uniform_instance(
    d: usize,
    support: usize,
    key_len: usize,
    kappa: f64,
    claimed_eta: f64,
) -> Result<PseudoresourcePair> {
    let left = KeyedEnsemble::from_fn(key_len, |k| Ok(incoherent(d, k as usize % d)))?;
    let right = KeyedEnsemble::from_fn(key_len, |k| {
        BipartiteState::pure(phased_uniform(d, support, k)?, d, 1)
    })?;
    let oracle: Arc<dyn FreeSetOracle> = Arc::new(CoherenceOracle::with_kappa(d, kappa)?);
    PseudoresourcePair::new(left, right, oracle, claimed_eta)
}

/// Probability vector `t·e₀ + (1−t)·u` on `d` outcomes with Shannon entropy
/// `eta` bits.
pub fn entropy_profile(d: usize, eta: f64) -> Result<Vec<f64>> {
    let max = (d as f64).log2();
    if !(0.0..=max).contains(&eta) {
        return Err(Error::OutOfRange(format!(
            "entropy {eta} not in [0, {max}]"
        )));
    }
    let profile = |t: f64| {
        let mut p = vec![(1.0 - t) / d as f64; d];
        p[0] += t;
        p
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shannon_entropy(profile(mid)) > eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(profile(0.5 * (lo + hi)))
}

/// Randomly keyed coherence instance: incoherent states at random levels
/// against pure states whose dephased spectrum is a permuted
/// [`entropy_profile`] with random phases. The gap is exactly `eta`.
pub fn random_coherence_instance<R: Rng + ?Sized>(
    d: usize,
    kappa: f64,
    eta: f64,
    key_len: usize,
    rng: &mut R,
) -> Result<PseudoresourcePair> {
    let p = entropy_profile(d, eta)?;
    let left = KeyedEnsemble::from_fn(key_len, |_| Ok(incoherent(d, rng.random_range(0..d))))?;
    let right = KeyedEnsemble::from_fn(key_len, |_| {
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(rng);
        let amps = perm
            .iter()
            .map(|&j| Complex64::from_polar(p[j].sqrt(), 2.0 * PI * rng.random::<f64>()));
        BipartiteState::pure(
            PureState::normalized(CVector::from_iterator(d, amps))?,
            d,
            1,
        )
    })?;
    let oracle: Arc<dyn FreeSetOracle> = Arc::new(CoherenceOracle::with_kappa(d, kappa)?);
    PseudoresourcePair::new(left, right, oracle, eta)
}

/// Product basis states against Pauli-keyed copies of `Φ^⊗2`, both on
/// `(2+2) : (2+2)` qubits; entanglement entropies 0 and 2.
pub fn bell_vs_product_instance() -> Result<PurePePair> {
    let right = pauli_keyed_bell(2)?;
    let left = KeyedEnsemble::from_fn(right.key_len(), |k| {
        BipartiteState::pure(PureState::basis(16, k as usize), 4, 4)
    })?;
    PurePePair::new(left, right, 2.0)
}

fn bloch_state(r: [f64; 3]) -> Result<DensityMatrix> {
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + r[2]), 0.0),
            c(0.5 * r[0], -0.5 * r[1]),
            c(0.5 * r[0], 0.5 * r[1]),
            c(0.5 * (1.0 - r[2]), 0.0),
        ],
    );
    DensityMatrix::new(m)
}

/// Mixed qubit families with Bloch vectors `(x, y, ±delta)`, `(x, y)` random
/// in a disc; every cross pair is at trace distance at least `delta`.
pub fn bloch_families<R: Rng + ?Sized>(
    delta: f64,
    key_len: usize,
    rng: &mut R,
) -> Result<EpfiPair> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::OutOfRange(format!(
            "delta = {delta} must be in [0, 0.5)"
        )));
    }
    // keep the states strictly mixed
    let radius = 0.9 * (1.0 - delta * delta).sqrt();
    let mut family = |z: f64| {
        KeyedEnsemble::from_fn(key_len, |_| {
            let (rad, phi) = (
                radius * rng.random::<f64>().sqrt(),
                2.0 * PI * rng.random::<f64>(),
            );
            BipartiteState::mixed(bloch_state([rad * phi.cos(), rad * phi.sin(), z])?, 2, 1)
        })
    };
    let left = family(delta)?;
    let right = family(-delta)?;
    EpfiPair::explicit(left, right, delta)
}

/// Computational basis states `|k⟩` against `|k + 2^key_len⟩`.
pub fn orthogonal_families(key_len: usize) -> Result<EpfiPair> {
    let d = 2usize << key_len;
    let left = KeyedEnsemble::from_fn(key_len, |k| {
        BipartiteState::pure(PureState::basis(d, k as usize), d, 1)
    })?;
    let right = KeyedEnsemble::from_fn(key_len, |k| {
        BipartiteState::pure(PureState::basis(d, (k as usize) + (1 << key_len)), d, 1)
    })?;
    EpfiPair::explicit(left, right, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epfi::{from_pseudoresource, from_pure_pseudoentanglement, verify_pairwise_far};
    use crate::linalg::von_neumann_entropy;
    use crate::resource::CoherenceOracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn profile_hits_the_entropy() {
        for eta in [0.0, 1.3, 2.5, 3.9, 4.0] {
            let p = entropy_profile(16, eta).unwrap();
            assert!((shannon_entropy(p.iter().copied()) - eta).abs() < 1e-12);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert!(entropy_profile(16, 4.1).is_err());
    }

    #[test]
    fn random_coherence_gap_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pr = random_coherence_instance(16, 4.0, 3.2, 2, &mut rng).unwrap();
        let o = CoherenceOracle::new(16).unwrap();
        for (_, s) in pr.right.iter() {
            let dephased = CoherenceOracle::dephase(s.density());
            let r = von_neumann_entropy(&dephased) - von_neumann_entropy(s.density());
            assert!((r - 3.2).abs() < 1e-9);
            assert!(o.closest_free(s.density()).unwrap().contains(3.2, 1e-9));
        }
        let pair = from_pseudoresource(&pr).unwrap();
        assert!((pair.certified_delta - 0.3).abs() < 1e-12);
        assert!(verify_pairwise_far(&pair).unwrap().1.satisfied);
    }

    #[test]
    fn bell_vs_product_gives_the_fannes_delta() {
        let pair = from_pure_pseudoentanglement(&bell_vs_product_instance().unwrap()).unwrap();
        assert_eq!(pair.pair_count(), 256);
        let (min, report) = verify_pairwise_far(&pair).unwrap();
        assert!((min - 0.75).abs() < 1e-12 && report.satisfied);
    }

    #[test]
    fn bloch_and_orthogonal_families_are_far() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pair = bloch_families(0.3, 3, &mut rng).unwrap();
        let (min, report) = verify_pairwise_far(&pair).unwrap();
        assert!(min >= 0.3 - 1e-12 && report.satisfied);
        assert!(pair.left.iter().all(|(_, s)| s.density().rank(1e-9) == 2));
        let orth = orthogonal_families(2).unwrap();
        assert_eq!(verify_pairwise_far(&orth).unwrap().0, 1.0);
    }
}
