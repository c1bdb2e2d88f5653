//! Subcommand definitions and dispatch for the `pseudolab` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use pseudolab::bounds::{binding_fidelity_bound, copies_amplification};
use pseudolab::commitment::{build_from_epfi, commit, optimal_opening_attack, reveal_verify};
use pseudolab::epfi::{statistical_hiding_advantage, verify_pairwise_far, EpfiPair};
use pseudolab::linalg::BipartiteState;
use pseudolab::locc::{
    distillation_deficit, locked_entanglement_demo, DistillationCertificate, OutputRegisters,
};
use pseudolab::resource::KeyedEnsemble;

use crate::format::{load_circuit, load_ensemble, save_ensemble};
use crate::report::{Caveats, CheckRecord, Report};
use crate::suite::{run_suite, Suite, SuiteConfig, DEFAULT_MAX_DIM};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pseudolab",
    version,
    about = "Seeded numerical checks for keyed quantum state families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Skip checks whose states exceed this dimension (at most 64).
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override a tolerance, e.g. `--tol bound=1e-8`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol)]
    pub tolerances: Vec<(String, f64)>,
    /// Print the JSON report on stdout instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Clone)]
pub struct PairArgs {
    /// Ensemble file for the bit-0 family.
    #[arg(long)]
    pub left: PathBuf,
    /// Ensemble file for the bit-1 family.
    #[arg(long)]
    pub right: PathBuf,
    /// Claimed lower bound on every cross-pair trace distance.
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the continuity, discrimination and amplification checks.
    VerifyBounds {
        #[command(flatten)]
        common: Common,
    },
    /// Check a supplied pair of families, or run the built-in EPFI suite.
    VerifyEpfi {
        #[command(flatten)]
        common: Common,
        #[arg(long, requires_all = ["right", "delta"])]
        left: Option<PathBuf>,
        #[arg(long, requires_all = ["left", "delta"])]
        right: Option<PathBuf>,
        #[arg(long, requires_all = ["left", "right"])]
        delta: Option<f64>,
        /// Copies for the mixture-distance check.
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Commit to a bit with the scheme built from two families.
    Commit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        bit: u8,
        #[arg(long, default_value_t = 0)]
        key: u64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Write the committed register state as a one-state ensemble file.
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Run the optimal opening attack from `(0, key)` to `(1, key1)`.
    Attack {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0)]
        key: u64,
        #[arg(long, default_value_t = 0)]
        key1: u64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Check a distillation certificate: family, circuit and target pairs.
    Distill {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        circuit: PathBuf,
        /// Number of Bell pairs the circuit claims to output.
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Key-assisted distillation against key-oblivious circuits on Pauli-keyed Bell pairs.
    LockedDemo {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        pairs: usize,
    },
    /// Run the selected suites (all when `--suite` is absent).
    Report {
        #[command(flatten)]
        common: Common,
        /// Comma-separated suite list; an empty value selects none.
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Option<Vec<String>>,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = value
        .parse()
        .map_err(|e| format!("tolerance `{name}`: {e}"))?;
    Ok((name.to_string(), v))
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

impl Common {
    fn config(&self, suites: Vec<Suite>) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            max_dim: self.max_dim,
            tolerances: self.tolerances.iter().cloned().collect::<BTreeMap<_, _>>(),
            suites,
        }
    }

    fn single(&self, suite: &str, records: Vec<CheckRecord>, caveats: Caveats) -> Report {
        Report::assemble(self.seed, vec![suite.to_string()], records, vec![], caveats)
    }
}

fn load_pair(p: &PairArgs) -> Result<EpfiPair, UsageError> {
    let left = load_ensemble(&p.left)?;
    let right = load_ensemble(&p.right)?;
    Ok(EpfiPair::explicit(left, right, p.delta)?)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64() * 1e3)
}

fn stamp(mut records: Vec<CheckRecord>, ms: f64) -> Vec<CheckRecord> {
    records.iter_mut().for_each(|r| r.runtime_ms = ms);
    records
}

/// Runs one command and returns its report.
pub fn execute(cmd: &Command) -> Result<(Report, &Common), UsageError> {
    match cmd {
        Command::VerifyBounds { common } => {
            Ok((run_suite(&common.config(vec![Suite::Bounds]))?, common))
        }
        Command::Report { common, suites } => {
            let suites = match suites {
                None => Suite::ALL.to_vec(),
                Some(list) => list
                    .iter()
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse())
                    .collect::<Result<Vec<Suite>, String>>()?,
            };
            Ok((run_suite(&common.config(suites))?, common))
        }
        Command::VerifyEpfi {
            common,
            left,
            right,
            delta,
            copies,
        } => {
            let (Some(left), Some(right), Some(delta)) = (left, right, delta) else {
                return Ok((run_suite(&common.config(vec![Suite::Epfi]))?, common));
            };
            common.config(vec![]).validate()?;
            let pair = load_pair(&PairArgs {
                left: left.clone(),
                right: right.clone(),
                delta: *delta,
            })?;
            let tol = common.config(vec![]).tol("bound");
            let (records, ms) = timed(|| -> Result<_, UsageError> {
                let (min, _) = verify_pairwise_far(&pair)?;
                let mix = statistical_hiding_advantage(&pair, *copies)?;
                Ok(vec![CheckRecord::lower(
                    "epfi/pairwise-min",
                    "far-pairs-close-mixtures",
                    min,
                    pair.certified_delta,
                    tol,
                )
                .with_note(format!(
                    "key-averaged {copies}-copy states at trace distance {mix:.3e}"
                ))])
            });
            let caveats = Caveats {
                statistical_surrogate: true,
                proxy_measure: false,
            };
            Ok((common.single("epfi", stamp(records?, ms), caveats), common))
        }
        Command::Commit {
            common,
            pair,
            bit,
            key,
            copies,
            state_out,
        } => {
            let epfi = load_pair(pair)?;
            let tol = common.config(vec![]).tol("bound");
            let scheme = build_from_epfi(&epfi, *copies)?;
            let (res, ms) = timed(|| -> Result<_, UsageError> {
                let t = commit(&scheme, *bit, *key, *copies)?;
                let accept = reveal_verify(&scheme, &t.joint_state, *bit, *key)?;
                Ok((t, accept))
            });
            let (t, accept) = res?;
            if let Some(path) = state_out {
                let d = t.committed_state.dim();
                let state = BipartiteState::mixed(t.committed_state.clone(), d, 1)?;
                save_ensemble(path, &KeyedEnsemble::single(state))?;
            }
            let rec = CheckRecord::lower(
                format!("commit/bit={bit}/key={key}/reveal"),
                "honest-reveal",
                accept,
                1.0,
                tol,
            );
            Ok((
                common.single("commitment", stamp(vec![rec], ms), Caveats::default()),
                common,
            ))
        }
        Command::Attack {
            common,
            pair,
            key,
            key1,
            copies,
        } => {
            let epfi = load_pair(pair)?;
            let tol = common.config(vec![]).tol("attack");
            let scheme = build_from_epfi(&epfi, *copies)?;
            let (res, ms) = timed(|| optimal_opening_attack(&scheme, *key, *key1, *copies));
            let a = res?;
            let bound =
                binding_fidelity_bound(copies_amplification(epfi.certified_delta, *copies)?)?;
            let name = format!("attack/key={key}/key1={key1}/m={copies}");
            let records = vec![
                CheckRecord::upper(
                    format!("{name}/binding"),
                    "commitment-binding",
                    a.success_prob,
                    bound,
                    tol,
                ),
                CheckRecord::equal(
                    format!("{name}/uhlmann"),
                    "uhlmann-attack",
                    a.achieved_overlap,
                    a.success_prob,
                    tol,
                ),
            ];
            Ok((
                common.single("commitment", stamp(records, ms), Caveats::default()),
                common,
            ))
        }
        Command::Distill {
            common,
            family,
            circuit,
            pairs,
            eps,
        } => {
            let fam = load_ensemble(family)?;
            let file = load_circuit(circuit)?;
            let cert = DistillationCertificate {
                family: fam,
                circuit: file.to_map()?,
                target_m: *pairs,
                eps: *eps,
                output: file
                    .output_registers()
                    .unwrap_or_else(|| OutputRegisters::pairs(*pairs)),
            };
            let (res, ms) = timed(|| distillation_deficit(&cert));
            let r = res?;
            let records: Vec<_> = r
                .per_key
                .iter()
                .map(|(k, d)| {
                    CheckRecord::upper(
                        format!("distill/key={k}"),
                        "one-shot-distillation",
                        *d,
                        *eps,
                        0.0,
                    )
                })
                .collect();
            Ok((
                common.single("locc", stamp(records, ms), Caveats::default()),
                common,
            ))
        }
        Command::LockedDemo { common, pairs } => {
            let cfg = common.config(vec![]);
            cfg.validate()?;
            let (res, ms) = timed(|| locked_entanglement_demo(*pairs));
            let rep = res?;
            let (b, c) = (cfg.tol("bound"), cfg.tol("certificate"));
            let tag = "locked-entanglement";
            let records = vec![
                CheckRecord::upper(
                    "locked/with-key-deficit",
                    tag,
                    rep.max_with_key_deficit,
                    0.0,
                    c,
                ),
                CheckRecord::upper(
                    "locked/key-average-deviation",
                    tag,
                    rep.key_average_deviation,
                    0.0,
                    c,
                ),
                CheckRecord::upper(
                    "locked/no-key-fidelity",
                    tag,
                    rep.no_key_best_fidelity,
                    0.5,
                    b,
                )
                .with_note(format!(
                    "{} circuits: {}",
                    rep.circuits_enumerated, rep.scope
                )),
                CheckRecord::lower(
                    "locked/key-average-ppt",
                    tag,
                    rep.key_average_ppt_min,
                    0.0,
                    c,
                ),
            ];
            let caveats = Caveats {
                statistical_surrogate: true,
                proxy_measure: false,
            };
            Ok((common.single("locc", stamp(records, ms), caveats), common))
        }
    }
}

fn write_report(path: &Path, report: &Report) -> Result<(), UsageError> {
    fs::write(path, report.to_json()).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// Runs the parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = execute(&cli.command).and_then(|(report, common)| {
        if let Some(path) = &common.out {
            write_report(path, &report)?;
        }
        if common.json {
            print!("{}", report.to_json());
        } else {
            print!("{}", report.table());
        }
        Ok(report)
    });
    match result {
        Ok(r) if r.failed() => EXIT_CHECK_FAILED,
        Ok(_) => EXIT_PASS,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}
