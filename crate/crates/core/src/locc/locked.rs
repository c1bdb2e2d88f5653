//! Pauli-keyed Bell pairs: fully distillable with the key, maximally mixed
//! on average without it.

use std::collections::HashSet;

use rayon::prelude::*;

use super::certificates::{
    distillation_deficit, keyed_correction_circuit, DistillationCertificate,
};
use super::circuit::{local_gates, side_qubits, Registers};
use super::sim::{dephase, gate_left, OutputRegisters};
use crate::epfi::{pauli_bell_vs_mixed, statistical_hiding_advantage};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, tensor, BipartiteState, CMatrix, DensityMatrix, PureState};

/// Largest number of Bell pairs the demo accepts.
pub const MAX_DEMO_PAIRS: usize = 2;

/// Gates per circuit in the enumerated key-oblivious family, by pair count.
pub fn default_enumeration_depth(n_pairs: usize) -> usize {
    if n_pairs <= 1 {
        6
    } else {
        3
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LockedDemoReport {
    pub n_pairs: usize,
    /// `1 − F(Γ(k, ψ_k), Φ^⊗n)` for the key-aware correction, per key.
    pub with_key_deficits: Vec<(u64, f64)>,
    pub max_with_key_deficit: f64,
    /// `max |avg_k ψ_k − I/4^n|`.
    pub key_average_deviation: f64,
    /// Smallest eigenvalue of the partial transpose of the key average.
    pub key_average_ppt_min: f64,
    /// Trace distance between the key average and the maximally mixed
    /// reference.
    pub mixture_advantage: f64,
    /// Largest key-averaged fidelity with `Φ` (first pair) reached by any
    /// circuit of the enumerated key-oblivious family.
    pub no_key_best_fidelity: f64,
    /// Circuits in the family (ordered gate sequences).
    pub circuits_enumerated: u64,
    /// Distinct (Alice unitary, Bob unitary) combinations evaluated.
    pub channels_evaluated: u64,
    /// What the no-key enumeration covers.
    pub scope: String,
}

/// Canonical form of a unitary up to global phase, for deduplication.
fn phase_key(u: &CMatrix) -> Vec<i64> {
    let pivot = u
        .iter()
        .find(|z| z.norm() > 1e-6)
        .copied()
        .unwrap_or_default();
    let phase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        pivot
    };
    u.iter()
        .flat_map(|z| {
            let w = z * phase;
            [(w.re * 1e6).round() as i64, (w.im * 1e6).round() as i64]
        })
        .collect()
}

/// Distinct unitaries reachable with at most `depth` gates from `pool`,
/// with the number of gate sequences of each exact length.
fn reachable(
    regs: &Registers,
    pool: &[super::circuit::Gate],
    depth: usize,
) -> (Vec<(CMatrix, usize)>, Vec<u64>) {
    let n = 1usize << regs.total();
    let id = CMatrix::identity(n, n);
    let mut seen = HashSet::new();
    seen.insert(phase_key(&id));
    let mut all = vec![(id.clone(), 0)];
    let mut frontier = vec![id];
    let mut sequences = vec![1u64];
    for len in 1..=depth {
        sequences.push(sequences[len - 1] * pool.len() as u64);
        let mut next = Vec::new();
        for u in &frontier {
            for g in pool {
                let mut v = u.clone();
                gate_left(&mut v, regs, g);
                if seen.insert(phase_key(&v)) {
                    next.push(v.clone());
                    all.push((v, len));
                }
            }
        }
        frontier = next;
    }
    (all, sequences)
}

/// Best key-averaged Bell fidelity over one-round key-oblivious circuits with
/// at most `depth` gates in total, on `n` pairs with a one-qubit `C`.
fn no_key_enumeration(n_pairs: usize, depth: usize) -> Result<(f64, u64, u64)> {
    let regs = Registers {
        n_a: n_pairs,
        t_a: 0,
        n_b: n_pairs,
        t_b: 0,
        c: 1,
    };
    let n = 1usize << regs.total();
    let d = 1usize << n_pairs;
    let pool_a = local_gates(&side_qubits(&regs, true));
    let pool_b = local_gates(&side_qubits(&regs, false));
    let (ua, seq_a) = reachable(&regs, &pool_a, depth);
    let (ub, seq_b) = reachable(&regs, &pool_b, depth);
    // key-averaged input: I/d² on AB, C in |0⟩
    let rho0 = tensor::kron(
        &DensityMatrix::maximally_mixed(d * d).into_matrix(),
        DensityMatrix::basis(2, 0).matrix(),
    );
    let taus: Vec<(CMatrix, usize)> = ua
        .par_iter()
        .map(|(u, l)| {
            let mut t = u * &rho0 * u.adjoint();
            dephase(&mut t, &regs);
            (t, *l)
        })
        .collect();
    // Φ on (A0, B0) with everything else traced: measurement operator on AB⊗C
    let phi = BipartiteState::pure(PureState::bell(), 2, 2)?;
    let rest = CMatrix::identity(n / 4, n / 4);
    let op = tensor::permute_subsystems(
        &tensor::kron(phi.density().matrix(), &rest),
        &[2, 2, d / 2, d / 2, 2],
        &[0, 2, 1, 3, 4],
    )?;
    // Tr[D(U_B τ U_B†) Φ] = Tr[τ U_B† Φ U_B] since Φ ⊗ I_C commutes with the dephasing
    let ms: Vec<(CMatrix, usize)> = ub
        .par_iter()
        .map(|(u, l)| (u.adjoint() * &op * u, *l))
        .collect();
    let best = taus
        .par_iter()
        .map(|(t, la)| {
            ms.iter()
                .filter(|(_, lb)| la + lb <= depth)
                .map(|(m, _)| {
                    t.iter()
                        .zip(m.transpose().iter())
                        .map(|(x, y)| (x * y).re)
                        .sum::<f64>()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let pairs = taus
        .iter()
        .map(|(_, la)| ms.iter().filter(|(_, lb)| la + lb <= depth).count() as u64)
        .sum();
    let circuits = (0..=depth)
        .map(|la| {
            (0..=depth - la)
                .map(|lb| seq_a[la] * seq_b[lb])
                .sum::<u64>()
        })
        .sum();
    Ok((best, circuits, pairs))
}

pub fn locked_entanglement_demo(n_pairs: usize) -> Result<LockedDemoReport> {
    locked_entanglement_demo_with_depth(n_pairs, default_enumeration_depth(n_pairs))
}

pub fn locked_entanglement_demo_with_depth(
    n_pairs: usize,
    depth: usize,
) -> Result<LockedDemoReport> {
    if n_pairs == 0 || n_pairs > MAX_DEMO_PAIRS {
        return Err(Error::OutOfRange(format!(
            "n_pairs = {n_pairs} must be 1..={MAX_DEMO_PAIRS}"
        )));
    }
    let pair = pauli_bell_vs_mixed(n_pairs)?;
    let cert = DistillationCertificate {
        family: pair.left.clone(),
        circuit: keyed_correction_circuit(n_pairs)?,
        target_m: n_pairs,
        eps: 1e-12,
        output: OutputRegisters::pairs(n_pairs),
    };
    let with_key = distillation_deficit(&cert)?;
    let d = 1usize << n_pairs;
    let avg = pair.left.mixture();
    let key_average_deviation =
        max_abs(&(avg.matrix() - DensityMatrix::maximally_mixed(d * d).matrix()));
    let key_average_ppt_min = BipartiteState::mixed(avg, d, d)?.ppt_min_eigenvalue();
    let mixture_advantage = statistical_hiding_advantage(&pair, 1)?;
    let (best, circuits, channels) = no_key_enumeration(n_pairs, depth)?;
    Ok(LockedDemoReport {
        n_pairs,
        max_with_key_deficit: with_key.max_deficit,
        with_key_deficits: with_key.per_key,
        key_average_deviation,
        key_average_ppt_min,
        mixture_advantage,
        no_key_best_fidelity: best,
        circuits_enumerated: circuits,
        channels_evaluated: channels,
        scope: format!(
            "one-round circuits of at most {depth} gates from {{H, X, Z, S, CNOT, CZ, Toffoli}} on A, B \
             and a one-qubit C, no ancillas; fidelity with a Bell pair on (A0, B0), averaged over keys"
        ),
    })
}
