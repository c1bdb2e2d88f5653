use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::random::{
    random_density_matrix, random_density_matrix_rank, random_pure_state, random_unitary,
};
use crate::linalg::{
    fidelity, helstrom_measurement, relative_entropy, root_fidelity, tensor, trace_distance,
    von_neumann_entropy, BipartiteState, DensityMatrix, Side,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dims() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 3, 4, 6, 8])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_states_are_valid(seed: u64, d in dims(), rank in 1usize..=8) {
        let mut r = rng(seed);
        let rho = random_density_matrix_rank(d, rank.min(d), &mut r);
        let again = DensityMatrix::new(rho.matrix().clone());
        prop_assert!(again.is_ok());
        prop_assert!(rho.rank(1e-9) <= rank.min(d));
        let psi = random_pure_state(d, &mut r);
        prop_assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_is_a_metric(seed: u64, d in dims()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_density_matrix(d, &mut r), random_density_matrix(d, &mut r), random_density_matrix(d, &mut r));
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
        let bc = trace_distance(&b, &c).unwrap();
        prop_assert!(trace_distance(&a, &c).unwrap() <= ab + bc + 1e-12);
    }

    #[test]
    fn fidelity_conventions_agree(seed: u64, d in dims()) {
        let mut r = rng(seed);
        let (a, b) = (random_density_matrix(d, &mut r), random_density_matrix(d, &mut r));
        let f = fidelity(&a, &b).unwrap();
        let rf = root_fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - rf * rf).abs() < 1e-10);
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-8);
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unitary_invariance(seed: u64, d in dims()) {
        let mut r = rng(seed);
        let (a, b) = (random_density_matrix(d, &mut r), random_density_matrix(d, &mut r));
        let u = random_unitary(d, &mut r);
        let (ua, ub) = (a.conjugate(&u).unwrap(), b.conjugate(&u).unwrap());
        prop_assert!((von_neumann_entropy(&a) - von_neumann_entropy(&ua)).abs() < 1e-9);
        prop_assert!((trace_distance(&a, &b).unwrap() - trace_distance(&ua, &ub).unwrap()).abs() < 1e-9);
        prop_assert!((fidelity(&a, &b).unwrap() - fidelity(&ua, &ub).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn entropy_range_and_additivity(seed: u64, d in dims(), e in dims()) {
        let mut r = rng(seed);
        let (a, b) = (random_density_matrix(d, &mut r), random_density_matrix(e, &mut r));
        let s = von_neumann_entropy(&a);
        prop_assert!(s >= -1e-12 && s <= (d as f64).log2() + 1e-12);
        let joint = von_neumann_entropy(&a.tensor(&b));
        prop_assert!((joint - s - von_neumann_entropy(&b)).abs() < 1e-9);
    }

    #[test]
    fn relative_entropy_is_nonnegative(seed: u64, d in dims()) {
        let mut r = rng(seed);
        let (a, b) = (random_density_matrix(d, &mut r), random_density_matrix(d, &mut r));
        prop_assert!(relative_entropy(&a, &b).unwrap() >= -1e-10);
        prop_assert!(relative_entropy(&a, &a).unwrap().abs() < 1e-9);
        // Pinsker: D ≥ 2Δ²/ln 2 in bits
        let dl = trace_distance(&a, &b).unwrap();
        prop_assert!(relative_entropy(&a, &b).unwrap() >= 2.0 * dl * dl / std::f64::consts::LN_2 - 1e-9);
    }

    #[test]
    fn partial_trace_of_products(seed: u64, d in dims(), e in dims()) {
        let mut r = rng(seed);
        let (a, b) = (random_density_matrix(d, &mut r), random_density_matrix(e, &mut r));
        let ab = BipartiteState::mixed(a.tensor(&b), d, e).unwrap();
        let ra = ab.partial_trace(Side::A);
        let rb = ab.partial_trace(Side::B);
        prop_assert!((ra.matrix() - a.matrix()).norm() < 1e-12);
        prop_assert!((rb.matrix() - b.matrix()).norm() < 1e-12);
        let kept = tensor::partial_trace_keep(ab.density().matrix(), &[d, e], &[1]).unwrap();
        prop_assert!((kept - b.matrix()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_contracts_distance(seed: u64) {
        let mut r = rng(seed);
        let (x, y) = (random_density_matrix(8, &mut r), random_density_matrix(8, &mut r));
        let (bx, by) = (BipartiteState::mixed(x.clone(), 2, 4).unwrap(), BipartiteState::mixed(y.clone(), 2, 4).unwrap());
        let full = trace_distance(&x, &y).unwrap();
        prop_assert!(trace_distance(&bx.partial_trace(Side::A), &by.partial_trace(Side::A)).unwrap() <= full + 1e-12);
        prop_assert!(trace_distance(&bx.partial_trace(Side::B), &by.partial_trace(Side::B)).unwrap() <= full + 1e-12);
    }

    #[test]
    fn pure_state_entropies_match_across_cut(seed: u64, d in dims(), e in dims()) {
        let mut r = rng(seed);
        let psi = BipartiteState::pure(random_pure_state(d * e, &mut r), d, e).unwrap();
        let sa = von_neumann_entropy(&psi.partial_trace(Side::A));
        let sb = von_neumann_entropy(&psi.partial_trace(Side::B));
        prop_assert!((sa - sb).abs() < 1e-9);
        prop_assert!((sa - psi.entanglement_entropy()).abs() < 1e-9);
    }

    #[test]
    fn helstrom_matches_trace_distance(seed: u64, d in dims()) {
        let mut r = rng(seed);
        let (a, b) = (random_density_matrix(d, &mut r), random_density_matrix(d, &mut r));
        let (povm, p) = helstrom_measurement(&a, &b).unwrap();
        let expected = 0.5 * (1.0 + trace_distance(&a, &b).unwrap());
        prop_assert!((p - expected).abs() < 1e-9);
        prop_assert!((povm.success_probability(&a, &b) - expected).abs() < 1e-9);
    }
}

#[test]
fn bell_state_is_maximally_entangled() {
    let bell = BipartiteState::pure(crate::linalg::PureState::bell(), 2, 2).unwrap();
    assert_abs_diff_eq!(bell.entanglement_entropy(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(bell.ppt_min_eigenvalue(), -0.5, epsilon = 1e-12);
}
