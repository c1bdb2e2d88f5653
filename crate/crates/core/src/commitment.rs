//! Canonical quantum bit commitments.
//!
//! Commit: prepare `Q_b^k |0⟩` on `C ⊗ R` (m copies), send `C`. Reveal: send
//! `b`, `k` and `R`; the verifier undoes `Q_b^k` and projects onto `|0⟩`.
//! The cheating committer's best reveal is the Uhlmann rotation on `R`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::epfi::EpfiPair;
use crate::error::{Error, Result};
use crate::linalg::{
    check_unitary, fidelity, tensor, trace_distance, CMatrix, CVector, DensityMatrix, PureState,
    SUPPORT_TOL,
};

/// Unitarity tolerance for commitment circuits.
pub const UNITARY_TOL: f64 = 1e-9;

/// Limit on `m·log₂(dC·dR)`.
pub const MAX_JOINT_QUBITS: f64 = 12.0;

/// Circuits `Q_b^k` on `C ⊗ R`, one per bit and key.
#[derive(Debug, Clone)]
pub struct CommitCircuitFamily {
    d_c: usize,
    d_r: usize,
    key_lens: [usize; 2],
    circuits: [Vec<CMatrix>; 2],
    prepared: [Vec<PureState>; 2],
    copies: usize,
    synthesized: bool,
}

/// Unitary whose first column is `psi` (phase-corrected Householder
/// reflection).
pub fn unitary_from_state(psi: &PureState) -> CMatrix {
    let v = psi.amplitudes();
    let d = v.len();
    let phase = if v[0].norm() > 0.0 {
        v[0] / v[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut u = v.clone();
    u[0] -= phase;
    let nu = u.norm_squared();
    let id = CMatrix::identity(d, d);
    if nu < 1e-30 {
        return id.map(|z| z * phase);
    }
    (id - (&u * u.adjoint()).unscale(nu / 2.0)).map(|z| z * phase)
}

fn basis_zero(d: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[0] = Complex64::new(1.0, 0.0);
    v
}

impl CommitCircuitFamily {
    /// `zero[k]`, `one[k]` are the circuits for bit 0 and 1, indexed by key.
    pub fn new(
        d_c: usize,
        d_r: usize,
        key_lens: [usize; 2],
        zero: Vec<CMatrix>,
        one: Vec<CMatrix>,
    ) -> Result<Self> {
        let d = d_c * d_r;
        if d == 0 {
            return Err(Error::OutOfRange(
                "register dimensions must be positive".into(),
            ));
        }
        let circuits = [zero, one];
        let mut prepared: [Vec<PureState>; 2] = [Vec::new(), Vec::new()];
        for b in 0..2 {
            if circuits[b].len() != 1usize << key_lens[b] {
                return Err(Error::InvalidCircuit(format!(
                    "bit {b} has {} circuits for key length {}",
                    circuits[b].len(),
                    key_lens[b]
                )));
            }
            for u in &circuits[b] {
                if u.nrows() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: u.nrows(),
                    });
                }
                check_unitary(u, UNITARY_TOL)?;
                prepared[b].push(PureState::normalized(u * basis_zero(d))?);
            }
        }
        Ok(CommitCircuitFamily {
            d_c,
            d_r,
            key_lens,
            circuits,
            prepared,
            copies: 1,
            synthesized: false,
        })
    }

    /// Circuits synthesised from target states on `C ⊗ R`.
    pub fn from_states(
        d_c: usize,
        d_r: usize,
        key_lens: [usize; 2],
        mut state: impl FnMut(u8, u64) -> Result<PureState>,
    ) -> Result<Self> {
        let mut sides: [Vec<CMatrix>; 2] = [Vec::new(), Vec::new()];
        for b in 0..2u8 {
            for k in 0..(1u64 << key_lens[b as usize]) {
                let psi = state(b, k)?;
                if psi.dim() != d_c * d_r {
                    return Err(Error::DimensionMismatch {
                        expected: d_c * d_r,
                        found: psi.dim(),
                    });
                }
                sides[b as usize].push(unitary_from_state(&psi));
            }
        }
        let [zero, one] = sides;
        let mut s = Self::new(d_c, d_r, key_lens, zero, one)?;
        s.synthesized = true;
        Ok(s)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_c, self.d_r)
    }

    pub fn key_len(&self, b: u8) -> usize {
        self.key_lens[b as usize & 1]
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn with_copies(mut self, m: usize) -> Self {
        self.copies = m;
        self
    }

    /// Whether the circuits were synthesised from states rather than given.
    pub fn synthesized(&self) -> bool {
        self.synthesized
    }

    fn check(&self, b: u8, k: u64) -> Result<()> {
        if b > 1 {
            return Err(Error::OutOfRange(format!("bit {b}")));
        }
        let len = self.key_lens[b as usize];
        if k >= 1u64 << len {
            return Err(Error::InvalidKey {
                key: k,
                key_len: len,
            });
        }
        Ok(())
    }

    pub fn circuit(&self, b: u8, k: u64) -> Result<&CMatrix> {
        self.check(b, k)?;
        Ok(&self.circuits[b as usize][k as usize])
    }

    /// `Q_b^k |0⟩`.
    pub fn prepared(&self, b: u8, k: u64) -> Result<&PureState> {
        self.check(b, k)?;
        Ok(&self.prepared[b as usize][k as usize])
    }

    fn check_copies(&self, m: usize) -> Result<()> {
        let qubits = m as f64 * ((self.d_c * self.d_r) as f64).log2();
        if qubits > MAX_JOINT_QUBITS + 1e-12 {
            return Err(Error::DimensionBlowup {
                what: format!("{m} copies of C⊗R"),
                dim: (self.d_c * self.d_r).saturating_pow(m as u32),
                limit: 1 << MAX_JOINT_QUBITS as u32,
            });
        }
        Ok(())
    }

    /// Subsystem dims of `(C⊗R)^⊗m` and the C / R subsystem indices.
    fn layout(&self, m: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let dims = (0..m).flat_map(|_| [self.d_c, self.d_r]).collect();
        (
            dims,
            (0..m).map(|i| 2 * i).collect(),
            (0..m).map(|i| 2 * i + 1).collect(),
        )
    }

    /// Single-copy committed state `Tr_R Q_b^k|0⟩⟨0|Q_b^k†`.
    pub fn committed_state(&self, b: u8, k: u64) -> Result<DensityMatrix> {
        let psi = self.prepared(b, k)?;
        let m = tensor::reduce_pure(psi.amplitudes(), &[self.d_c, self.d_r], &[0])?;
        DensityMatrix::from_numerical(m)
    }
}

#[derive(Debug, Clone)]
pub struct CommitmentTranscript {
    pub b: u8,
    pub k: u64,
    pub m: usize,
    /// `(Q_b^k|0⟩)^⊗m`, copies laid out `C₁R₁C₂R₂..`.
    pub joint_state: PureState,
    /// Reduction of `joint_state` onto `C₁..C_m`.
    pub committed_state: DensityMatrix,
}

pub fn commit(
    scheme: &CommitCircuitFamily,
    b: u8,
    k: u64,
    m: usize,
) -> Result<CommitmentTranscript> {
    scheme.check_copies(m)?;
    let psi = scheme.prepared(b, k)?;
    let joint = psi.tensor_power(m);
    let (dims, c_idx, _) = scheme.layout(m);
    let committed =
        DensityMatrix::from_numerical(tensor::reduce_pure(joint.amplitudes(), &dims, &c_idx)?)?;
    Ok(CommitmentTranscript {
        b,
        k,
        m,
        joint_state: joint,
        committed_state: committed,
    })
}

/// Probability that the verifier, undoing `Q_b^k` on every copy, sees all
/// zeros.
pub fn reveal_verify(
    scheme: &CommitCircuitFamily,
    state: &PureState,
    b: u8,
    k: u64,
) -> Result<f64> {
    let psi = scheme.prepared(b, k)?;
    let d = psi.dim();
    let mut m = 0usize;
    let mut n = 1usize;
    while n < state.dim() && d > 1 {
        n *= d;
        m += 1;
    }
    if n != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.dim(),
        });
    }
    Ok(psi
        .tensor_power(m)
        .overlap(state)
        .norm_sqr()
        .clamp(0.0, 1.0))
}

#[derive(Debug, Clone)]
pub struct AttackResult {
    /// `F(ρ_{C,0}^{k ⊗m}, ρ_{C,1}^{k' ⊗m})`, squared convention.
    pub success_prob: f64,
    /// Unitary on `R₁..R_m ⊗ Z` (rows and columns in that order).
    pub attack_unitary: CMatrix,
    pub d_z: usize,
    /// Acceptance probability of the attacked commitment when opened as
    /// `(1, k')`.
    pub achieved_overlap: f64,
    /// The commit-to-0 state after the attack, laid out like the transcript.
    pub attacked_state: PureState,
}

/// Uhlmann-optimal conversion of an honest commitment to `(0, k)` into an
/// opening of `(1, k')`, acting on the retained `R` registers only.
pub fn optimal_opening_attack(
    scheme: &CommitCircuitFamily,
    k: u64,
    k1: u64,
    m: usize,
) -> Result<AttackResult> {
    let t0 = commit(scheme, 0, k, m)?;
    let t1 = commit(scheme, 1, k1, m)?;
    let success_prob = fidelity(&t0.committed_state, &t1.committed_state)?;
    let (dims, c_idx, r_idx) = scheme.layout(m);
    let m0 = tensor::to_matrix(t0.joint_state.amplitudes(), &dims, &c_idx, &r_idx);
    let m1 = tensor::to_matrix(t1.joint_state.amplitudes(), &dims, &c_idx, &r_idx);
    // ⟨ψ₁|(I ⊗ V)|ψ₀⟩ = Tr(M₁† M₀ Vᵀ); maximised by Vᵀ = Q P† for M₁†M₀ = P Σ Q†.
    let x = m1.adjoint() * &m0;
    let svd = x.svd(true, true);
    let p = svd.u.expect("requested");
    let q_adj = svd.v_t.expect("requested");
    let w = q_adj.adjoint() * p.adjoint();
    let v = w.transpose();
    let attacked = &m0 * &w;
    let amps = tensor::from_matrix(&attacked, &dims, &c_idx, &r_idx);
    let attacked_state = PureState::normalized(amps)?;
    let achieved_overlap = t1
        .joint_state
        .overlap(&attacked_state)
        .norm_sqr()
        .clamp(0.0, 1.0);
    Ok(AttackResult {
        success_prob,
        attack_unitary: v,
        d_z: 1,
        achieved_overlap,
        attacked_state,
    })
}

/// Canonical purification `Σ √λᵢ |vᵢ⟩|i⟩` padded to `d_r`.
fn purify(rho: &DensityMatrix, d_r: usize) -> Result<PureState> {
    let eig = rho.eigen();
    let d = rho.dim();
    let mut amps = CVector::zeros(d * d_r);
    for (i, &l) in eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > SUPPORT_TOL)
    {
        for c in 0..d {
            amps[c * d_r + i] = eig.vectors[(c, i)] * l.sqrt();
        }
    }
    PureState::normalized(amps)
}

/// Scheme committing to `ψ_k` (bit 0) or `φ_k'` (bit 1) with `m` copies.
///
/// `R` has dimension equal to the largest rank in either family; pure
/// states are used as given with `R` in `|0⟩`.
pub fn build_from_epfi(pair: &EpfiPair, m: usize) -> Result<CommitCircuitFamily> {
    let d_c = pair.dim();
    let fams = [&pair.left, &pair.right];
    let d_r = fams
        .iter()
        .flat_map(|e| e.iter())
        .map(|(_, s)| {
            if s.pure_state().is_some() {
                1
            } else {
                s.density().rank(SUPPORT_TOL)
            }
        })
        .max()
        .unwrap_or(1)
        .max(1);
    let mut sides: [Vec<CMatrix>; 2] = [Vec::new(), Vec::new()];
    for (b, e) in fams.iter().enumerate() {
        for k in 0..(1u64 << e.key_len()) {
            let s = e.get(k)?;
            let psi = match s.pure_state() {
                Some(p) => p.tensor(&PureState::basis(d_r, 0)),
                None => purify(s.density(), d_r)?,
            };
            sides[b].push(unitary_from_state(&psi));
        }
    }
    let [zero, one] = sides;
    let scheme = CommitCircuitFamily::new(
        d_c,
        d_r,
        [pair.left.key_len(), pair.right.key_len()],
        zero,
        one,
    )?;
    scheme.check_copies(m)?;
    Ok(CommitCircuitFamily {
        synthesized: true,
        ..scheme.with_copies(m)
    })
}

/// Trace distance between the key-averaged committed states for the two bits.
pub fn statistical_hiding_of_scheme(scheme: &CommitCircuitFamily, m: usize) -> Result<f64> {
    scheme.check_copies(m)?;
    let avg = |b: u8| -> Result<DensityMatrix> {
        let states = (0..(1u64 << scheme.key_len(b)))
            .into_par_iter()
            .map(|k| commit(scheme, b, k, m).map(|t| t.committed_state))
            .collect::<Result<Vec<_>>>()?;
        DensityMatrix::average(&states)
    };
    trace_distance(&avg(0)?, &avg(1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epfi::pauli_bell_vs_mixed;
    use crate::linalg::{random::random_pure_state, BipartiteState};
    use crate::resource::KeyedEnsemble;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single(state: BipartiteState) -> KeyedEnsemble {
        KeyedEnsemble::single(state)
    }

    #[test]
    fn householder_prepares_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [1, 2, 5, 8] {
            let psi = random_pure_state(d, &mut rng);
            let u = unitary_from_state(&psi);
            check_unitary(&u, 1e-12).unwrap();
            assert!((&u * basis_zero(d) - psi.amplitudes()).norm() < 1e-12);
        }
        let e = PureState::basis(3, 0);
        assert!((unitary_from_state(&e) - CMatrix::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn identity_and_bell_commitments() {
        let id = CMatrix::identity(4, 4);
        let s = CommitCircuitFamily::new(2, 2, [0, 0], vec![id.clone()], vec![id]).unwrap();
        let t = commit(&s, 1, 0, 2).unwrap();
        assert!((t.committed_state.matrix() - DensityMatrix::basis(4, 0).matrix()).norm() < 1e-12);

        let bell =
            CommitCircuitFamily::from_states(2, 2, [0, 0], |_, _| Ok(PureState::bell())).unwrap();
        let t = commit(&bell, 0, 0, 1).unwrap();
        assert!(
            (t.committed_state.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm()
                < 1e-12
        );
        assert!((reveal_verify(&bell, &t.joint_state, 0, 0).unwrap() - 1.0).abs() < 1e-9);
        assert!(commit(&bell, 0, 1, 1).is_err());
        assert!(commit(&bell, 0, 0, 7).is_err());
    }

    #[test]
    fn orthogonal_commitments_cannot_be_opened() {
        let s = CommitCircuitFamily::from_states(2, 1, [0, 0], |b, _| {
            Ok(PureState::basis(2, b as usize))
        })
        .unwrap();
        let t = commit(&s, 0, 0, 1).unwrap();
        assert!(reveal_verify(&s, &t.joint_state, 1, 0).unwrap() < 1e-9);
        let a = optimal_opening_attack(&s, 0, 0, 2).unwrap();
        assert!(a.success_prob < 1e-12 && a.achieved_overlap < 1e-12);
        assert!((statistical_hiding_of_scheme(&s, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_commitments_open_perfectly() {
        let s =
            CommitCircuitFamily::from_states(2, 2, [0, 0], |_, _| Ok(PureState::bell())).unwrap();
        let a = optimal_opening_attack(&s, 0, 0, 1).unwrap();
        assert!((a.success_prob - 1.0).abs() < 1e-9);
        assert!((a.achieved_overlap - 1.0).abs() < 1e-9);
        assert_eq!(statistical_hiding_of_scheme(&s, 1).unwrap(), 0.0);
    }

    #[test]
    fn fuchs_van_de_graaf_tight_pair() {
        // pure qubit states with |⟨a|b⟩|² = 0.64 have Δ = 0.6, F = 0.64
        let b = PureState::from_real(&[0.8, 0.6]).unwrap();
        let s = CommitCircuitFamily::from_states(2, 1, [0, 0], |bit, _| {
            Ok(if bit == 0 {
                PureState::basis(2, 0)
            } else {
                b.clone()
            })
        })
        .unwrap();
        let a = optimal_opening_attack(&s, 0, 0, 1).unwrap();
        assert!((a.success_prob - 0.64).abs() < 1e-12);
        assert!(a.success_prob <= crate::bounds::binding_fidelity_bound(0.6).unwrap());
        assert!((a.achieved_overlap - a.success_prob).abs() < 1e-9);
    }

    #[test]
    fn attack_matches_uhlmann_on_mixed_commitments() {
        let pair = pauli_bell_vs_mixed(1).unwrap();
        let scheme = build_from_epfi(&pair, 2).unwrap();
        assert_eq!(scheme.dims(), (4, 4));
        for k in 0..4 {
            let a = optimal_opening_attack(&scheme, k, 0, 2).unwrap();
            assert!((a.achieved_overlap - a.success_prob).abs() < 1e-6);
            // F(Φ, I/4) = 1/4 per copy
            assert!(
                (a.success_prob - 1.0 / 16.0).abs() < 1e-12,
                "{}",
                a.success_prob
            );
            check_unitary(&a.attack_unitary, 1e-9).unwrap();
            let t0 = commit(&scheme, 0, k, 2).unwrap();
            let (dims, c_idx, _) = scheme.layout(2);
            let after = tensor::reduce_pure(a.attacked_state.amplitudes(), &dims, &c_idx).unwrap();
            assert!((after - t0.committed_state.matrix()).norm() < 1e-9);
            let opened = reveal_verify(&scheme, &a.attacked_state, 1, 0).unwrap();
            assert!((opened - a.achieved_overlap).abs() < 1e-9);
        }
        assert!(statistical_hiding_of_scheme(&scheme, 1).unwrap() < 1e-9);
    }

    #[test]
    fn epfi_commitment_is_tensor_power() {
        let pair = pauli_bell_vs_mixed(1).unwrap();
        let scheme = build_from_epfi(&pair, 3).unwrap();
        let t = commit(&scheme, 0, 2, 3).unwrap();
        let psi = pair.left.get(2).unwrap().density();
        let direct = psi.tensor(psi).tensor(psi);
        assert!((t.committed_state.matrix() - direct.matrix()).norm() < 1e-9);
    }

    #[test]
    fn single_key_orthogonal_epfi() {
        let a = BipartiteState::pure(PureState::basis(4, 0), 2, 2).unwrap();
        let b = BipartiteState::pure(PureState::basis(4, 3), 2, 2).unwrap();
        let pair = EpfiPair::explicit(single(a), single(b), 1.0).unwrap();
        let scheme = build_from_epfi(&pair, 1).unwrap();
        for m in 1..=3 {
            assert!(
                optimal_opening_attack(&scheme, 0, 0, m)
                    .unwrap()
                    .success_prob
                    < 1e-12
            );
        }
    }
}
