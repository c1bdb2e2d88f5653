//! One-shot distillation and cost certificates for supplied circuits.

use rayon::prelude::*;

use super::circuit::{Gate, KeyedLoccMap, LoccCircuit, Qubit, Register, Registers};
use super::sim::{apply_keyed, select_output, OutputRegisters};
use crate::error::{Error, Result};
use crate::linalg::{fidelity, BipartiteState, PureState};
use crate::resource::KeyedEnsemble;

#[derive(Debug, Clone)]
pub struct DistillationCertificate {
    pub family: KeyedEnsemble,
    pub circuit: KeyedLoccMap,
    pub target_m: usize,
    pub eps: f64,
    /// Output qubits forming the `target_m` pairs, `a[i]` with `b[i]`.
    pub output: OutputRegisters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeficitReport {
    /// `1 − F` per key.
    pub per_key: Vec<(u64, f64)>,
    pub max_deficit: f64,
    pub valid: bool,
}

impl DeficitReport {
    fn new(per_key: Vec<(u64, f64)>, eps: f64) -> Self {
        let max_deficit = per_key.iter().map(|p| p.1).fold(0.0, f64::max);
        DeficitReport {
            per_key,
            max_deficit,
            valid: max_deficit <= eps,
        }
    }
}

fn key_for(map: &KeyedLoccMap, family: &KeyedEnsemble, k: u64) -> Result<u64> {
    match map.key_len {
        0 => Ok(0),
        l if l == family.key_len() => Ok(k),
        l => Err(Error::InvalidCircuit(format!(
            "circuit key length {l} differs from family key length {}",
            family.key_len()
        ))),
    }
}

/// `⟨Φ^⊗m| ρ |Φ^⊗m⟩` with pairs `(A_i, B_i)`.
pub fn bell_fidelity(state: &BipartiteState) -> f64 {
    let (d_a, d_b) = state.dims();
    debug_assert_eq!(d_a, d_b);
    let phi = PureState::maximally_entangled(d_a);
    let v = phi.amplitudes();
    (v.adjoint() * state.density().matrix() * v)[(0, 0)]
        .re
        .clamp(0.0, 1.0)
}

/// Per key: `1 − F(output pairs, Φ^⊗m)`; valid iff the worst key is within ε.
pub fn distillation_deficit(cert: &DistillationCertificate) -> Result<DeficitReport> {
    let m = cert.target_m;
    if cert.output.a.len() != m || cert.output.b.len() != m {
        return Err(Error::BadOutputDesignation(format!(
            "{} + {} output qubits designated for {m} pairs",
            cert.output.a.len(),
            cert.output.b.len()
        )));
    }
    let per_key = cert
        .family
        .entries()
        .par_iter()
        .map(|(k, s)| {
            let key = key_for(&cert.circuit, &cert.family, *k)?;
            let out = select_output(&apply_keyed(&cert.circuit, key, s)?, &cert.output)?;
            Ok((*k, 1.0 - bell_fidelity(&out)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeficitReport::new(per_key, cert.eps))
}

/// Per key: `1 − F(ρ_k, Γ(k, Φ^⊗n_in))` on the designated output qubits.
pub fn cost_deficit(
    family: &KeyedEnsemble,
    circuit: &KeyedLoccMap,
    n_in: usize,
    eps: f64,
    output: &OutputRegisters,
) -> Result<DeficitReport> {
    let regs = circuit.base.registers();
    if regs.n_a != n_in || regs.n_b != n_in {
        return Err(Error::InvalidCircuit(format!(
            "circuit data registers ({}, {}) do not take {n_in} Bell pairs",
            regs.n_a, regs.n_b
        )));
    }
    let (d_a, d_b) = family.dims();
    if d_a != 1 << output.a.len() || d_b != 1 << output.b.len() {
        return Err(Error::BadOutputDesignation(format!(
            "output of {}+{} qubits cannot match family dims {d_a}x{d_b}",
            output.a.len(),
            output.b.len()
        )));
    }
    let d = 1usize << n_in;
    let input = BipartiteState::pure(PureState::maximally_entangled(d), d, d)?;
    let per_key = family
        .entries()
        .par_iter()
        .map(|(k, s)| {
            let key = key_for(circuit, family, *k)?;
            let out = select_output(&apply_keyed(circuit, key, &input)?, output)?;
            Ok((*k, 1.0 - fidelity(s.density(), out.density())?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeficitReport::new(per_key, eps))
}

// Bob's copy of the key is omitted: two pairs with both copies need 12 qubits.
fn pauli_registers(n_pairs: usize) -> Registers {
    Registers {
        n_a: n_pairs,
        t_a: 2 * n_pairs,
        n_b: n_pairs,
        t_b: 0,
        c: 0,
    }
}

fn keyed_pauli_gates(n_pairs: usize, undo: bool) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for j in 0..n_pairs {
        let target = Qubit::new(Register::A, j);
        let x = Gate::cnot(Qubit::new(Register::AncA, 2 * j), target)?;
        let z = Gate::cz(Qubit::new(Register::AncA, 2 * j + 1), target)?;
        // P = X^x Z^z: prepare with Z then X, undo with X then Z
        if undo {
            gates.extend([x, z]);
        } else {
            gates.extend([z, x]);
        }
    }
    Ok(gates)
}

/// Applies `P_k†` on A's qubits, reading `k` from A's key register.
pub fn keyed_correction_circuit(n_pairs: usize) -> Result<KeyedLoccMap> {
    let base = LoccCircuit::one_round(
        pauli_registers(n_pairs),
        keyed_pauli_gates(n_pairs, true)?,
        vec![],
    )?;
    KeyedLoccMap::alice_only(base, 2 * n_pairs)
}

/// Applies `P_k` on A's halves of the input Bell pairs.
pub fn keyed_preparation_circuit(n_pairs: usize) -> Result<KeyedLoccMap> {
    let base = LoccCircuit::one_round(
        pauli_registers(n_pairs),
        keyed_pauli_gates(n_pairs, false)?,
        vec![],
    )?;
    KeyedLoccMap::alice_only(base, 2 * n_pairs)
}

#[cfg(test)]
mod tests {
    use super::super::circuit::{random_circuit, GateKind};
    use super::*;
    use crate::epfi::pauli_keyed_bell;
    use crate::linalg::random::random_pure_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell_regs(t: usize, c: usize) -> Registers {
        Registers {
            n_a: 1,
            t_a: t,
            n_b: 1,
            t_b: t,
            c,
        }
    }

    fn phi() -> KeyedEnsemble {
        KeyedEnsemble::single(BipartiteState::pure(PureState::bell(), 2, 2).unwrap())
    }

    #[test]
    fn identity_distils_a_bell_pair() {
        let cert = DistillationCertificate {
            family: phi(),
            circuit: KeyedLoccMap::unkeyed(LoccCircuit::empty(bell_regs(0, 0)).unwrap()),
            target_m: 1,
            eps: 1e-12,
            output: OutputRegisters::pairs(1),
        };
        let r = distillation_deficit(&cert).unwrap();
        assert!(r.max_deficit < 1e-12 && r.valid, "{r:?}");
        let bad = DistillationCertificate {
            target_m: 2,
            ..cert
        };
        assert!(matches!(
            distillation_deficit(&bad),
            Err(Error::BadOutputDesignation(_))
        ));
    }

    #[test]
    fn keyed_correction_distils_every_key() {
        for n in [1, 2] {
            let cert = DistillationCertificate {
                family: pauli_keyed_bell(n).unwrap(),
                circuit: keyed_correction_circuit(n).unwrap(),
                target_m: n,
                eps: 1e-12,
                output: OutputRegisters::pairs(n),
            };
            let r = distillation_deficit(&cert).unwrap();
            assert_eq!(r.per_key.len(), 1 << (2 * n));
            assert!(r.valid, "{:?}", r.per_key);
        }
    }

    #[test]
    fn products_stay_far_from_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let a = random_pure_state(2, &mut rng);
            let b = random_pure_state(2, &mut rng);
            let fam = KeyedEnsemble::single(BipartiteState::pure(a.tensor(&b), 2, 2).unwrap());
            let c = random_circuit(bell_regs(1, 1), 2, 5, &mut rng).unwrap();
            let cert = DistillationCertificate {
                family: fam,
                circuit: KeyedLoccMap::unkeyed(c),
                target_m: 1,
                eps: 0.5,
                output: OutputRegisters::pairs(1),
            };
            assert!(distillation_deficit(&cert).unwrap().max_deficit >= 0.5 - 1e-9);
        }
    }

    #[test]
    fn cost_certificates() {
        let id = KeyedLoccMap::unkeyed(LoccCircuit::empty(bell_regs(0, 0)).unwrap());
        let r = cost_deficit(&phi(), &id, 1, 1e-12, &OutputRegisters::pairs(1)).unwrap();
        assert!(r.valid);

        // no input pairs; each side leaves its fresh ancilla in |0⟩
        let prep = KeyedLoccMap::unkeyed(
            LoccCircuit::empty(Registers {
                n_a: 0,
                t_a: 1,
                n_b: 0,
                t_b: 1,
                c: 0,
            })
            .unwrap(),
        );
        let zero =
            KeyedEnsemble::single(BipartiteState::pure(PureState::basis(4, 0), 2, 2).unwrap());
        let r = cost_deficit(&zero, &prep, 0, 1e-12, &OutputRegisters::pairs(1)).unwrap();
        assert!(r.valid);

        let r = cost_deficit(
            &pauli_keyed_bell(1).unwrap(),
            &keyed_preparation_circuit(1).unwrap(),
            1,
            1e-12,
            &OutputRegisters::pairs(1),
        )
        .unwrap();
        assert_eq!(r.per_key.len(), 4);
        assert!(r.valid, "{:?}", r.per_key);

        // flipping the target breaks it
        let x = LoccCircuit::one_round(
            bell_regs(0, 0),
            vec![Gate::single(GateKind::X, Qubit::new(Register::A, 0))],
            vec![],
        )
        .unwrap();
        let r = cost_deficit(
            &phi(),
            &KeyedLoccMap::unkeyed(x),
            1,
            0.1,
            &OutputRegisters::pairs(1),
        )
        .unwrap();
        assert!(!r.valid);
        assert!(cost_deficit(&phi(), &id, 2, 0.1, &OutputRegisters::pairs(1)).is_err());
    }
}
