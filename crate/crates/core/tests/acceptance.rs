//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Seeded, so every run sees the same samples.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pseudolab::bounds::{
    binding_fidelity_bound, copies_amplification, fannes_bound, winter_resource_bound, FANNES_CAP,
};
use pseudolab::commitment::{build_from_epfi, commit, optimal_opening_attack, reveal_verify};
use pseudolab::epfi::{
    from_pseudoresource, from_pure_pseudoentanglement, pauli_bell_vs_mixed,
    statistical_hiding_advantage, verify_pairwise_far, EpfiPair,
};
use pseudolab::instances::{
    bell_vs_product_instance, bloch_families, coherence_uniform_instance, orthogonal_families,
    random_coherence_instance,
};
use pseudolab::linalg::random::{random_density_matrix, random_povm, random_pure_state};
use pseudolab::linalg::{
    check_unitary, fidelity, helstrom_measurement, tensor, trace_distance, von_neumann_entropy,
    BipartiteState, CMatrix, PureState,
};
use pseudolab::locc::{
    apply_locc, choi_matrix, locked_entanglement_demo, random_circuit, Registers,
};
use pseudolab::resource::{relative_entropy_of_resource, CoherenceOracle, SeparabilityOracle};

const SEED: u64 = 42;
const TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn par_max(xs: impl ParallelIterator<Item = f64>) -> f64 {
    xs.reduce(|| f64::NEG_INFINITY, f64::max)
}

fn fannes() -> Outcome {
    let mut r = rng(1);
    let pairs: Vec<_> = [2usize, 4, 8, 16]
        .iter()
        .flat_map(|&d| (0..2500).map(move |_| d).collect::<Vec<_>>())
        .map(|d| {
            (
                d,
                random_density_matrix(d, &mut r),
                random_density_matrix(d, &mut r),
            )
        })
        .collect();
    let start = Instant::now();
    let violations: Vec<(usize, f64, f64)> = pairs
        .par_iter()
        .filter_map(|(d, a, b)| {
            let delta = trace_distance(a, b).unwrap();
            let lhs = (von_neumann_entropy(a) - von_neumann_entropy(b)).abs();
            let rhs = fannes_bound(delta, *d).unwrap();
            (lhs > rhs + TOL).then_some((*d, lhs, rhs))
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let mut detail = format!(
        "{} pairs, {} violations, {secs:.1}s",
        pairs.len(),
        violations.len()
    );
    if let Some((d, lhs, rhs)) = violations.first() {
        detail += &format!("; first at d={d}: |ΔS|={lhs:.6} > bound {rhs:.6}");
    }
    outcome(violations.is_empty() && secs < 60.0, detail)
}

fn winter() -> Outcome {
    let mut r = rng(2);
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for d in [2usize, 4, 8] {
        let oracle = CoherenceOracle::new(d).unwrap();
        let kappa = (d as f64).log2();
        let pairs: Vec<_> = (0..1000)
            .map(|_| {
                (
                    random_density_matrix(d, &mut r),
                    random_density_matrix(d, &mut r),
                )
            })
            .collect();
        let slack = par_max(pairs.par_iter().map(|(a, b)| {
            let ra = relative_entropy_of_resource(a, &oracle).unwrap();
            let rb = relative_entropy_of_resource(b, &oracle).unwrap();
            let lhs = (ra.upper - rb.upper).abs();
            lhs - winter_resource_bound(trace_distance(a, b).unwrap(), kappa).unwrap()
        }));
        worst = worst.max(slack);
        count += pairs.len();
    }
    outcome(
        worst <= TOL,
        format!("{count} pairs, max(lhs − bound) = {worst:.3e}"),
    )
}

fn fuchs_van_de_graaf() -> Outcome {
    let mut r = rng(3);
    let dims = [2usize, 3, 4, 8];
    let mixed: Vec<_> = (0..10_000)
        .map(|i| {
            let d = dims[i % dims.len()];
            (
                random_density_matrix(d, &mut r),
                random_density_matrix(d, &mut r),
            )
        })
        .collect();
    let worst = par_max(mixed.par_iter().map(|(a, b)| {
        let f = fidelity(a, b).unwrap();
        let delta = trace_distance(a, b).unwrap();
        (f - (1.0 - delta * delta)).max(f - (1.0 - delta * delta).sqrt())
    }));
    let pure: Vec<_> = (0..1000)
        .map(|i| {
            let d = dims[i % dims.len()];
            (
                random_pure_state(d, &mut r).density(),
                random_pure_state(d, &mut r).density(),
            )
        })
        .collect();
    let eq = par_max(pure.par_iter().map(|(a, b)| {
        let delta = trace_distance(a, b).unwrap();
        (fidelity(a, b).unwrap() - (1.0 - delta * delta)).abs()
    }));
    outcome(
        worst <= TOL && eq <= 1e-8,
        format!("max(F − bound) = {worst:.3e} over 10⁴ pairs, pure equality error {eq:.3e}"),
    )
}

fn helstrom() -> Outcome {
    let mut r = rng(4);
    let cases: Vec<_> = (0..1000)
        .map(|_| {
            let a = random_density_matrix(2, &mut r);
            let b = random_density_matrix(2, &mut r);
            let povms: Vec<_> = (0..1000).map(|_| random_povm(2, &mut r)).collect();
            (a, b, povms)
        })
        .collect();
    let (err, beaten) = cases
        .par_iter()
        .map(|(a, b, povms)| {
            let (opt, _) = helstrom_measurement(a, b).unwrap();
            let p = opt.success_probability(a, b);
            let err = (p - 0.5 * (1.0 + trace_distance(a, b).unwrap())).abs();
            let beaten = povms
                .iter()
                .filter(|e| e.success_probability(a, b) > p + TOL)
                .count();
            (err, beaten)
        })
        .reduce(|| (0.0, 0), |x, y| (x.0.max(y.0), x.1 + y.1));
    outcome(
        err <= TOL && beaten == 0,
        format!("max |P − ½(1+Δ)| = {err:.3e}, random POVMs beating it: {beaten}"),
    )
}

fn amplification() -> Outcome {
    let mut r = rng(5);
    let pairs: Vec<_> = (0..100)
        .map(|_| {
            (
                random_density_matrix(2, &mut r),
                random_density_matrix(2, &mut r),
            )
        })
        .collect();
    let fails: Vec<(usize, f64, f64)> = pairs
        .par_iter()
        .flat_map_iter(|(a, b)| {
            let delta = trace_distance(a, b).unwrap();
            (1..=5).filter_map(move |n| {
                let dn = trace_distance(&a.tensor_power(n), &b.tensor_power(n)).unwrap();
                let bound = copies_amplification(delta, n).unwrap();
                (dn < bound - TOL).then_some((n, dn, bound))
            })
        })
        .collect();
    let mut detail = format!("500 (pair, n) cases, {} below the bound", fails.len());
    if let Some((n, dn, b)) = fails.first() {
        detail += &format!("; first at n={n}: Δₙ={dn:.6} < {b:.6}");
    }
    outcome(fails.is_empty(), detail)
}

fn coherence_to_epfi() -> Outcome {
    let pair =
        from_pseudoresource(&coherence_uniform_instance(16, 16, 2, 4.0, 4.0).unwrap()).unwrap();
    let (min, _) = verify_pairwise_far(&pair).unwrap();
    let mut ok = (pair.certified_delta - 0.5).abs() <= 1e-12 && min >= 0.5 - TOL;
    let mut detail = format!("η=4, κ=4: δ = {}, min Δ = {min:.6}", pair.certified_delta);
    let mut r = rng(6);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let eta = r.random_range(2.5..=4.0);
        let inst = random_coherence_instance(16, 4.0, eta, 2, &mut r).unwrap();
        match from_pseudoresource(&inst) {
            Ok(p) => {
                let (min, _) = verify_pairwise_far(&p).unwrap();
                worst = worst.min(min - p.certified_delta);
                ok &= (p.certified_delta - (eta - 2.0) / 4.0).abs() <= 1e-12
                    && min >= p.certified_delta - TOL;
            }
            Err(e) => {
                ok = false;
                detail += &format!("; η={eta:.4} rejected: {e}");
            }
        }
    }
    detail += &format!("; 20 random instances, min(Δ − δ) = {worst:.4}");
    outcome(ok, detail)
}

fn entanglement_to_epfi() -> Outcome {
    let pe = bell_vs_product_instance().unwrap();
    let pair = from_pure_pseudoentanglement(&pe).unwrap();
    let expected = (2.0 - FANNES_CAP) / 4.0;
    let (min, report) = verify_pairwise_far(&pair).unwrap();
    let entropy_err = max_of(
        [(&pe.left, &pair.left), (&pe.right, &pair.right)]
            .iter()
            .flat_map(|(src, red)| {
                src.iter()
                    .zip(red.iter())
                    .map(|((_, s), (_, t))| {
                        (von_neumann_entropy(t.density()) - s.entanglement_entropy()).abs()
                    })
                    .collect::<Vec<_>>()
            }),
    );
    outcome(
        (pair.certified_delta - expected).abs() <= 1e-12 && report.satisfied && entropy_err <= 1e-8,
        format!(
            "δ = {:.10} (expected {expected:.10}), min Δ = {min:.6} over {} pairs, entropy error {entropy_err:.2e}",
            pair.certified_delta,
            pair.pair_count()
        ),
    )
}

fn commitment_binding() -> Outcome {
    let mut r = rng(8);
    let sources: Vec<(&str, EpfiPair)> = vec![
        (
            "δ=0.3 Bloch families",
            bloch_families(0.3, 2, &mut r).unwrap(),
        ),
        ("δ=0.5 Pauli-Bell vs I/4", pauli_bell_vs_mixed(1).unwrap()),
        ("δ=1 orthogonal", orthogonal_families(2).unwrap()),
    ];
    let mut ok = true;
    let mut worst_slack = f64::INFINITY;
    let mut worst_uhlmann: f64 = 0.0;
    let mut worst_reveal: f64 = 1.0;
    let mut cases = 0;
    for (name, pair) in &sources {
        let (min, _) = verify_pairwise_far(pair).unwrap();
        ok &= min >= pair.certified_delta - TOL;
        for m in 1..=3 {
            let scheme = build_from_epfi(pair, m).unwrap();
            let bound =
                binding_fidelity_bound(copies_amplification(pair.certified_delta, m).unwrap())
                    .unwrap();
            let keys: Vec<(u64, u64)> = (0..1u64 << scheme.key_len(0))
                .flat_map(|k| (0..1u64 << scheme.key_len(1)).map(move |k1| (k, k1)))
                .collect();
            let res: Vec<_> = keys
                .par_iter()
                .map(|&(k, k1)| {
                    let a = optimal_opening_attack(&scheme, k, k1, m).unwrap();
                    let t0 = commit(&scheme, 0, k, m).unwrap();
                    let t1 = commit(&scheme, 1, k1, m).unwrap();
                    // apply the returned unitary to the R registers ourselves
                    let d = scheme.dims();
                    let dims: Vec<usize> = (0..m).flat_map(|_| [d.0, d.1]).collect();
                    let c_idx: Vec<usize> = (0..m).map(|i| 2 * i).collect();
                    let r_idx: Vec<usize> = (0..m).map(|i| 2 * i + 1).collect();
                    let m0 = tensor::to_matrix(t0.joint_state.amplitudes(), &dims, &c_idx, &r_idx);
                    let moved: CMatrix = &m0 * a.attack_unitary.transpose();
                    let psi =
                        PureState::normalized(tensor::from_matrix(&moved, &dims, &c_idx, &r_idx))
                            .unwrap();
                    let achieved = t1.joint_state.overlap(&psi).norm_sqr();
                    let unitary = check_unitary(&a.attack_unitary, 1e-9).is_ok();
                    let reveal = reveal_verify(&scheme, &t0.joint_state, 0, k)
                        .unwrap()
                        .min(reveal_verify(&scheme, &t1.joint_state, 1, k1).unwrap());
                    (
                        a.success_prob,
                        (achieved - a.success_prob).abs(),
                        unitary,
                        reveal,
                    )
                })
                .collect();
            for (p, gap, unitary, reveal) in res {
                cases += 1;
                worst_slack = worst_slack.min(bound - p);
                worst_uhlmann = worst_uhlmann.max(gap);
                worst_reveal = worst_reveal.min(reveal);
                if p > bound + 1e-6 || gap > 1e-6 || !unitary || reveal < 1.0 - TOL {
                    ok = false;
                }
            }
        }
        let _ = name;
    }
    outcome(
        ok,
        format!(
            "{cases} (scheme, m, key pair) cases: min(bound − success) = {worst_slack:.4}, \
             Uhlmann gap {worst_uhlmann:.2e}, min honest acceptance {worst_reveal:.12}"
        ),
    )
}

fn separation_witness() -> Outcome {
    let pair = pauli_bell_vs_mixed(1).unwrap();
    let (min, _) = verify_pairwise_far(&pair).unwrap();
    let mix = statistical_hiding_advantage(&pair, 1).unwrap();
    outcome(
        min >= 0.5 - TOL && mix <= TOL,
        format!("min pairwise Δ = {min:.6}, mixture distance {mix:.2e}"),
    )
}

fn er_sandwich() -> Outcome {
    let mut r = rng(10);
    let oracle = SeparabilityOracle::new(2, 2).unwrap();
    let states: Vec<_> = (0..50).map(|_| random_pure_state(4, &mut r)).collect();
    let res: Vec<(bool, f64)> = states
        .par_iter()
        .map(|psi| {
            let e = BipartiteState::pure(psi.clone(), 2, 2)
                .unwrap()
                .entanglement_entropy();
            let b = relative_entropy_of_resource(&psi.density(), &oracle).unwrap();
            (b.contains(e, 1e-6) && b.width() <= 0.05 + 1e-6, b.width())
        })
        .collect();
    let bell = relative_entropy_of_resource(&PureState::bell().density(), &oracle).unwrap();
    let all = res.iter().all(|x| x.0);
    let widest = max_of(res.iter().map(|x| x.1));
    outcome(
        all && bell.contains(1.0, 1e-6),
        format!(
            "{}/50 brackets contain the entropy, widest {widest:.2e}; Bell bracket {bell}",
            res.iter().filter(|x| x.0).count()
        ),
    )
}

fn locked_demo() -> Outcome {
    let rep = locked_entanglement_demo(1).unwrap();
    let ok = rep.with_key_deficits.len() == 4
        && rep.max_with_key_deficit <= 1e-12
        && rep.key_average_deviation <= 1e-12
        && rep.no_key_best_fidelity <= 0.5 + TOL
        && rep.key_average_ppt_min >= -1e-12;
    outcome(
        ok,
        format!(
            "with-key deficit {:.1e} over 4 keys, |avg − I/4| = {:.1e}, no-key best F = {:.9} over {} circuits, PT min eig {:.4}",
            rep.max_with_key_deficit,
            rep.key_average_deviation,
            rep.no_key_best_fidelity,
            rep.circuits_enumerated,
            rep.key_average_ppt_min
        ),
    )
}

fn locc_sanity() -> Outcome {
    let mut r = rng(12);
    let regs = Registers {
        n_a: 1,
        t_a: 0,
        n_b: 1,
        t_b: 0,
        c: 1,
    };
    let oracle = SeparabilityOracle::new(2, 2).unwrap();
    let cases: Vec<_> = (0..100)
        .map(|i| {
            let circuit = random_circuit(regs, 1 + i % 3, 4, &mut r).unwrap();
            let input = if i % 2 == 0 {
                random_pure_state(4, &mut r).density()
            } else {
                random_density_matrix(4, &mut r)
            };
            (circuit, input)
        })
        .collect();
    let res: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|(circuit, input)| {
            let choi = choi_matrix(circuit).unwrap();
            let reduced = tensor::partial_trace_keep(&choi, &[4, 4], &[0]).unwrap();
            let tp = (reduced - CMatrix::identity(4, 4))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            let out = apply_locc(
                circuit,
                &BipartiteState::mixed(input.clone(), 2, 2).unwrap(),
            )
            .unwrap();
            let b_in = relative_entropy_of_resource(input, &oracle).unwrap();
            let b_out = relative_entropy_of_resource(out.density(), &oracle).unwrap();
            // lower(out) ≤ upper(in) unless the map increased E_R
            (tp, b_out.lower - b_in.upper)
        })
        .collect();
    let tp = max_of(res.iter().map(|x| x.0));
    let inc = max_of(res.iter().map(|x| x.1));
    outcome(
        tp <= TOL && inc <= TOL,
        format!("max TP error {tp:.2e}, max(lower_out − upper_in) = {inc:.3e} over 100 circuits"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("Fannes continuity", fannes),
        ("Winter continuity, coherence", winter),
        ("Fuchs-van de Graaf", fuchs_van_de_graaf),
        ("Helstrom optimality", helstrom),
        ("copy amplification", amplification),
        ("coherence gap to EPFI", coherence_to_epfi),
        ("entanglement gap to EPFI", entanglement_to_epfi),
        ("commitment binding", commitment_binding),
        ("far pairs, close mixtures", separation_witness),
        ("E_R bracket sandwich", er_sandwich),
        ("locked entanglement", locked_demo),
        ("LOCC sanity", locc_sanity),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<30} {}  ({:.1}s) {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed, {:.1}s",
        criteria.len() - failed,
        total.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
