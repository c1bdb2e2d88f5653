use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{binding_fidelity_bound, copies_amplification};
use crate::commitment::{build_from_epfi, commit, optimal_opening_attack, reveal_verify};
use crate::epfi::{pauli_keyed_bell, statistical_hiding_advantage, verify_pairwise_far};
use crate::instances::bloch_families;
use crate::linalg::random::random_density_matrix;
use crate::linalg::{fidelity, tensor, trace_distance, BipartiteState, CMatrix, DensityMatrix};
use crate::locc::{
    apply_keyed, apply_locc, choi_matrix, keyed_correction_circuit, random_circuit, Registers,
};
use crate::resource::{relative_entropy_of_resource, CoherenceOracle};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_locc_circuits_are_channels(seed: u64, rounds in 1usize..4, gates in 0usize..6, c in 0usize..2) {
        let mut r = rng(seed);
        let regs = Registers { n_a: 1, t_a: 1, n_b: 1, t_b: 0, c };
        let circuit = random_circuit(regs, rounds, gates, &mut r).unwrap();
        let choi = choi_matrix(&circuit).unwrap();
        // output side carries the ancillas too
        let d_out = choi.nrows() / 4;
        let reduced = tensor::partial_trace_keep(&choi, &[4, d_out], &[0]).unwrap();
        prop_assert!((reduced - CMatrix::identity(4, 4)).norm() < 1e-9);
        let out = apply_locc(&circuit, &BipartiteState::mixed(random_density_matrix(4, &mut r), 2, 2).unwrap()).unwrap();
        prop_assert!(DensityMatrix::new(out.density().matrix().clone()).is_ok());
    }

    #[test]
    fn locc_never_separates_states(seed: u64) {
        let mut r = rng(seed);
        let regs = Registers { n_a: 1, t_a: 0, n_b: 1, t_b: 0, c: 1 };
        let circuit = random_circuit(regs, 2, 3, &mut r).unwrap();
        let (x, y) = (random_density_matrix(4, &mut r), random_density_matrix(4, &mut r));
        let fx = apply_locc(&circuit, &BipartiteState::mixed(x.clone(), 2, 2).unwrap()).unwrap();
        let fy = apply_locc(&circuit, &BipartiteState::mixed(y.clone(), 2, 2).unwrap()).unwrap();
        prop_assert!(trace_distance(fx.density(), fy.density()).unwrap() <= trace_distance(&x, &y).unwrap() + 1e-9);
    }

    #[test]
    fn bloch_families_honour_their_distance(seed: u64, delta in 0.05f64..0.45) {
        let pair = bloch_families(delta, 2, &mut rng(seed)).unwrap();
        let (min, report) = verify_pairwise_far(&pair).unwrap();
        prop_assert!(report.satisfied && min >= delta - 1e-12);
    }

    #[test]
    fn commitment_attack_respects_binding(seed: u64, delta in 0.05f64..0.45, m in 1usize..3) {
        let pair = bloch_families(delta, 1, &mut rng(seed)).unwrap();
        let scheme = build_from_epfi(&pair, m).unwrap();
        let bound = binding_fidelity_bound(copies_amplification(delta, m).unwrap()).unwrap();
        for k in 0..2 {
            for k1 in 0..2 {
                let a = optimal_opening_attack(&scheme, k, k1, m).unwrap();
                let t0 = commit(&scheme, 0, k, m).unwrap();
                let t1 = commit(&scheme, 1, k1, m).unwrap();
                prop_assert!(a.success_prob <= bound + 1e-6);
                prop_assert!((a.achieved_overlap - fidelity(&t0.committed_state, &t1.committed_state).unwrap()).abs() < 1e-8);
                prop_assert!(reveal_verify(&scheme, &t0.joint_state, 0, k).unwrap() > 1.0 - 1e-9);
                // opening as the wrong bit is accepted with probability F(ρ₀, ρ₁) at most
                prop_assert!(reveal_verify(&scheme, &t0.joint_state, 1, k1).unwrap() <= a.success_prob + 1e-9);
            }
        }
    }

    #[test]
    fn coherence_is_unchanged_by_dephased_permutations(seed: u64, d in 2usize..6) {
        let mut r = rng(seed);
        let rho = random_density_matrix(d, &mut r);
        let oracle = CoherenceOracle::new(d).unwrap();
        let b = relative_entropy_of_resource(&rho, &oracle).unwrap();
        prop_assert!(b.width() < 1e-12 && b.lower >= -1e-12);
        // a basis permutation is a free unitary
        let perm = CMatrix::from_fn(d, d, |i, j| if (j + 1) % d == i { 1.0.into() } else { 0.0.into() });
        let moved = relative_entropy_of_resource(&rho.conjugate(&perm).unwrap(), &oracle).unwrap();
        prop_assert!((moved.upper - b.upper).abs() < 1e-9);
    }
}

#[test]
fn keyed_correction_restores_every_pair() {
    let family = pauli_keyed_bell(2).unwrap();
    let map = keyed_correction_circuit(2).unwrap();
    let bell = crate::linalg::PureState::maximally_entangled(4).density();
    for (k, s) in family.iter() {
        let out = apply_keyed(&map, k, s).unwrap();
        let data =
            crate::locc::select_output(&out, &crate::locc::OutputRegisters::pairs(2)).unwrap();
        assert!(
            (fidelity(data.density(), &bell).unwrap() - 1.0).abs() < 1e-12,
            "key {k}"
        );
    }
}

#[test]
fn pauli_keyed_bell_mixes_to_maximally_mixed() {
    let pair = crate::epfi::pauli_bell_vs_mixed(2).unwrap();
    assert!(statistical_hiding_advantage(&pair, 1).unwrap() < 1e-12);
    let avg = pair.left.mixture();
    assert!((avg.matrix() - DensityMatrix::maximally_mixed(16).matrix()).norm() < 1e-12);
}
