use proptest::prelude::*;

use crate::bounds::{
    binary_entropy, binding_fidelity_bound, copies_amplification, fannes_bound,
    winter_entanglement_bound, winter_resource_bound,
};

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| i as f64 / n as f64)
}

fn non_decreasing(f: impl Fn(f64) -> f64) -> bool {
    let v: Vec<f64> = grid(1000).map(f).collect();
    v.windows(2).all(|w| w[1] >= w[0] - 1e-12)
}

#[test]
fn bounds_are_monotone_on_grids() {
    for d in [2usize, 3, 4, 16, 64] {
        assert!(
            non_decreasing(|x| fannes_bound(x, d).unwrap()),
            "fannes d={d}"
        );
        assert!(
            non_decreasing(|x| winter_entanglement_bound(x, d).unwrap()),
            "winter d={d}"
        );
    }
    for kappa in [0.0, 1.0, 3.5, 8.0] {
        assert!(
            non_decreasing(|x| winter_resource_bound(x, kappa).unwrap()),
            "winter κ={kappa}"
        );
    }
    for n in [0usize, 1, 5, 40] {
        assert!(
            non_decreasing(|x| copies_amplification(x, n).unwrap()),
            "amplification n={n}"
        );
    }
    assert!(non_decreasing(|x| -binding_fidelity_bound(x).unwrap()));
}

#[test]
fn out_of_range_arguments_are_errors() {
    assert!(binary_entropy(1.5).is_err());
    assert!(binary_entropy(-0.1).is_err());
    assert!(fannes_bound(1.1, 2).is_err());
    assert!(binding_fidelity_bound(f64::NAN).is_err());
}

proptest! {
    #[test]
    fn binary_entropy_is_symmetric_and_bounded(p in 0.0f64..=1.0) {
        let h = binary_entropy(p).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert!((h - binary_entropy(1.0 - p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn amplification_grows_with_copies(delta in 0.0f64..=1.0, n in 0usize..50) {
        let a = copies_amplification(delta, n).unwrap();
        prop_assert!((0.0..1.0).contains(&a) || a == 0.0);
        prop_assert!(copies_amplification(delta, n + 1).unwrap() >= a);
    }

    #[test]
    fn binding_bound_is_pythagorean(delta in 0.0f64..=1.0) {
        let f = binding_fidelity_bound(delta).unwrap();
        prop_assert!((f * f + delta * delta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn winter_resource_matches_entanglement_form(eps in 0.0f64..=1.0, k in 1u32..7) {
        let d = 1usize << k;
        let a = winter_resource_bound(eps, k as f64).unwrap();
        let b = winter_entanglement_bound(eps, d).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
