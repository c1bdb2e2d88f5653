//! Check records and the machine-readable suite report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Result identifiers a check may cite. Every record carries one of these.
pub const TAGS: &[&str] = &[
    "fannes-continuity",
    "winter-continuity",
    "fuchs-van-de-graaf",
    "helstrom-optimality",
    "copy-amplification",
    "pseudoresource-to-epfi",
    "pure-pseudoentanglement-to-epfi",
    "mixed-pseudoentanglement-to-epfi",
    "far-pairs-close-mixtures",
    "commitment-binding",
    "uhlmann-attack",
    "honest-reveal",
    "statistical-hiding",
    "relative-entropy-of-resource",
    "locc-free-operations",
    "one-shot-distillation",
    "locked-entanglement",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub tag: String,
    /// Measured quantity.
    pub lhs: f64,
    /// Bound or target it is compared against.
    pub rhs: f64,
    pub status: Status,
    pub runtime_ms: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CheckRecord {
    /// Panics on a tag outside [`TAGS`]; checks are defined in code, so an
    /// unknown tag is a programming error.
    pub fn new(name: impl Into<String>, tag: &str, lhs: f64, rhs: f64, status: Status) -> Self {
        assert!(TAGS.contains(&tag), "unknown check tag `{tag}`");
        CheckRecord {
            name: name.into(),
            tag: tag.to_string(),
            lhs,
            rhs,
            status,
            runtime_ms: 0.0,
            note: String::new(),
        }
    }

    /// `lhs ≤ rhs + tol`.
    pub fn upper(name: impl Into<String>, tag: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let ok = lhs <= rhs + tol;
        Self::new(
            name,
            tag,
            lhs,
            rhs,
            if ok { Status::Pass } else { Status::Fail },
        )
    }

    /// `lhs ≥ rhs − tol`.
    pub fn lower(name: impl Into<String>, tag: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let ok = lhs >= rhs - tol;
        Self::new(
            name,
            tag,
            lhs,
            rhs,
            if ok { Status::Pass } else { Status::Fail },
        )
    }

    /// `|lhs − rhs| ≤ tol`.
    pub fn equal(name: impl Into<String>, tag: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let ok = (lhs - rhs).abs() <= tol;
        Self::new(
            name,
            tag,
            lhs,
            rhs,
            if ok { Status::Pass } else { Status::Fail },
        )
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caveats {
    /// Computational indistinguishability was replaced by a statistical
    /// distance between key-averaged states.
    pub statistical_surrogate: bool,
    /// An E_R value was replaced by a proxy (e.g. the two-copy bracket).
    pub proxy_measure: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub suites: Vec<String>,
    pub checks: Vec<CheckRecord>,
    /// Checks not run because they exceed `max_dim`.
    pub skipped: Vec<String>,
    pub caveats: Caveats,
    pub summary: Summary,
}

impl Report {
    /// Merges records keyed by name (later duplicates are an error) and
    /// recomputes the summary.
    pub fn assemble(
        seed: u64,
        suites: Vec<String>,
        records: Vec<CheckRecord>,
        skipped: Vec<String>,
        caveats: Caveats,
    ) -> Self {
        let mut by_name = BTreeMap::new();
        for r in records {
            let name = r.name.clone();
            assert!(
                by_name.insert(name.clone(), r).is_none(),
                "duplicate check name `{name}`"
            );
        }
        let checks: Vec<CheckRecord> = by_name.into_values().collect();
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            indeterminate: count(Status::Indeterminate),
        };
        Report {
            seed,
            suites,
            checks,
            skipped,
            caveats,
            summary,
        }
    }

    pub fn failed(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    /// The report with every `runtime_ms` zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        r.checks.iter_mut().for_each(|c| c.runtime_ms = 0.0);
        r
    }

    /// One line per check, for terminals.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Indeterminate => "INDET",
            };
            out += &format!(
                "{status:<5} {:<48} lhs={:<14.6e} rhs={:<14.6e} [{}]\n",
                c.name, c.lhs, c.rhs, c.tag
            );
        }
        out += &format!(
            "{} pass, {} fail, {} indeterminate, {} skipped\n",
            self.summary.pass,
            self.summary.fail,
            self.summary.indeterminate,
            self.skipped.len()
        );
        out
    }
}
