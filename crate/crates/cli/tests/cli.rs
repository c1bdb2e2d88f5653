use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pseudolab::epfi::pauli_keyed_bell;
use pseudolab::linalg::{BipartiteState, PureState};
use pseudolab::locc::keyed_correction_circuit;
use pseudolab::resource::KeyedEnsemble;
use pseudolab_cli::format::{save_circuit, save_ensemble, CircuitFile};
use pseudolab_cli::report::{Report, Status, TAGS};
use pseudolab_cli::suite::{run_suite, Suite, SuiteConfig};

fn pseudolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudolab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_report(path: &Path) -> Report {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bounds_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = pseudolab(&[
            "report",
            "--suite",
            "bounds",
            "--seed",
            "42",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (ra, rb) = (read_report(&a), read_report(&b));
    assert!(!ra.checks.is_empty());
    assert_eq!(
        ra.without_timings().to_json(),
        rb.without_timings().to_json()
    );
    assert_eq!(ra.summary.fail, 0);

    let other = dir.path().join("c.json");
    pseudolab(&[
        "report",
        "--suite",
        "bounds",
        "--seed",
        "43",
        "--out",
        other.to_str().unwrap(),
    ]);
    assert_ne!(
        read_report(&other).without_timings().checks,
        ra.without_timings().checks
    );
}

#[test]
fn empty_suite_list_gives_empty_report() {
    let o = pseudolab(&["report", "--suite", "", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.checks.is_empty() && r.suites.is_empty());
    assert_eq!(r.summary.pass + r.summary.fail + r.summary.indeterminate, 0);
}

#[test]
fn corrupted_bound_fails_and_names_the_check() {
    // a negative slack turns every upper-bound comparison into a violation
    let o = pseudolab(&["verify-bounds", "--tol", "bound=-10"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(
        out.lines()
            .any(|l| l.starts_with("FAIL") && l.contains("bounds/fannes/d=2")),
        "{out}"
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        pseudolab(&["report", "--suite", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pseudolab(&["report", "--tol", "made-up=1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pseudolab(&["report", "--max-dim", "65"]).status.code(),
        Some(2)
    );
    assert_eq!(pseudolab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn bad_trace_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"dims":[2,1],"key_len":0,"states":[[[0.98,0],[0,0],[0,0],[0,0]]]}"#,
    )
    .unwrap();
    let good = dir.path().join("good.json");
    fs::write(
        &good,
        r#"{"dims":[2,1],"key_len":0,"states":[[[0,0],[1,0]]]}"#,
    )
    .unwrap();
    let o = pseudolab(&[
        "verify-epfi",
        "--left",
        bad.to_str().unwrap(),
        "--right",
        good.to_str().unwrap(),
        "--delta",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trace"), "{}", stderr(&o));

    let missing = dir.path().join("missing.json");
    let o = pseudolab(&[
        "verify-epfi",
        "--left",
        missing.to_str().unwrap(),
        "--right",
        good.to_str().unwrap(),
        "--delta",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn write_basis_pair(dir: &Path) -> (String, String) {
    let state = |i| BipartiteState::pure(PureState::basis(2, i), 2, 1).unwrap();
    let left = dir.join("left.json");
    let right = dir.join("right.json");
    save_ensemble(&left, &KeyedEnsemble::single(state(0))).unwrap();
    save_ensemble(&right, &KeyedEnsemble::single(state(1))).unwrap();
    (
        left.to_str().unwrap().into(),
        right.to_str().unwrap().into(),
    )
}

#[test]
fn file_driven_commands() {
    let dir = tempfile::tempdir().unwrap();
    let (left, right) = write_basis_pair(dir.path());

    let o = pseudolab(&[
        "verify-epfi",
        "--left",
        &left,
        "--right",
        &right,
        "--delta",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // overclaimed distance
    let o = pseudolab(&[
        "verify-epfi",
        "--left",
        &left,
        "--right",
        &left,
        "--delta",
        "0.5",
    ]);
    assert_ne!(o.status.code(), Some(0));

    let state = dir.path().join("committed.json");
    let o = pseudolab(&[
        "commit",
        "--left",
        &left,
        "--right",
        &right,
        "--delta",
        "1",
        "--bit",
        "1",
        "--copies",
        "2",
        "--state-out",
        state.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(fs::read_to_string(&state).unwrap().contains("\"dims\""));

    let report = dir.path().join("attack.json");
    let o = pseudolab(&[
        "attack",
        "--left",
        &left,
        "--right",
        &right,
        "--delta",
        "1",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = read_report(&report);
    let binding = r
        .checks
        .iter()
        .find(|c| c.name.ends_with("/binding"))
        .unwrap();
    assert_eq!(binding.lhs, 0.0);
}

#[test]
fn distill_checks_a_supplied_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let family = dir.path().join("family.json");
    let circuit = dir.path().join("circuit.json");
    save_ensemble(&family, &pauli_keyed_bell(1).unwrap()).unwrap();
    save_circuit(
        &circuit,
        &CircuitFile::from_map(&keyed_correction_circuit(1).unwrap(), None),
    )
    .unwrap();
    let args = [
        "distill",
        "--family",
        family.to_str().unwrap(),
        "--circuit",
        circuit.to_str().unwrap(),
    ];
    let o = pseudolab(&args);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(),
        4
    );

    // the same circuit without the key register cannot undo the Paulis
    let mut file: CircuitFile =
        serde_json::from_str(&fs::read_to_string(&circuit).unwrap()).unwrap();
    file.key_len = 0;
    save_circuit(&circuit, &file).unwrap();
    assert_eq!(pseudolab(&args).status.code(), Some(1));
}

#[test]
fn locked_demo_passes() {
    let o = pseudolab(&["locked-demo", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.checks.len(), 4);
    assert!(r.caveats.statistical_surrogate);
}

#[test]
fn full_run_uses_known_tags_only() {
    let r = run_suite(&SuiteConfig::default()).unwrap();
    assert!(r.checks.iter().all(|c| TAGS.contains(&c.tag.as_str())));
    assert!(r.caveats.proxy_measure && r.caveats.statistical_surrogate);
    assert!(!r.skipped.is_empty());
    assert_eq!(r.summary.fail, 0, "{}", r.table());
    for suite in Suite::ALL {
        assert!(
            r.checks.iter().any(|c| c.name.starts_with(suite.name())),
            "{suite} ran nothing"
        );
    }
    // larger max_dim runs the skipped checks too
    let wide = run_suite(&SuiteConfig {
        max_dim: 64,
        suites: vec![Suite::Commitment],
        ..SuiteConfig::default()
    })
    .unwrap();
    assert!(wide.skipped.is_empty());
    assert!(wide.checks.iter().any(|c| c.name.contains("m=3")));
    assert!(
        wide.checks.iter().all(|c| c.status != Status::Fail),
        "{}",
        wide.table()
    );
}
