//! On-disk formats for keyed ensembles and LOCC circuits (JSON).
//!
//! Ensemble:
//!
//! ```json
//! { "dims": [2, 2], "key_len": 1,
//!   "states": [ [[0.5, 0.0], [0.0, 0.0], ...], ... ] }
//! ```
//!
//! `states[k]` is the state for key `k`. An entry list of length `dA·dB` is
//! a pure state vector, of length `(dA·dB)²` a density matrix in row-major
//! order. Indices are A-major.
//!
//! Circuit:
//!
//! ```json
//! { "registers": { "n_a": 1, "t_a": 0, "n_b": 1, "t_b": 0, "c": 1 },
//!   "key_len": 0,
//!   "rounds": [ { "a": [ { "gate": "CNOT", "targets": ["A0"], "controls": ["C0"] } ],
//!                 "b": [] } ],
//!   "output": { "a": [0], "b": [0] } }
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use pseudolab::linalg::{BipartiteState, CMatrix, CVector, DensityMatrix, PureState};
use pseudolab::locc::{
    Gate, GateKind, KeyedLoccMap, LoccCircuit, OutputRegisters, Qubit, Registers, Round,
};
use pseudolab::resource::{format_key, KeyedEnsemble};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: parse error: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, FormatError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub dims: [usize; 2],
    pub key_len: usize,
    pub states: Vec<Vec<[f64; 2]>>,
}

fn entries(z: impl Iterator<Item = Complex64>) -> Vec<[f64; 2]> {
    z.map(|c| [c.re, c.im]).collect()
}

impl EnsembleFile {
    pub fn from_ensemble(e: &KeyedEnsemble) -> Self {
        let (d_a, d_b) = e.dims();
        let states = e
            .iter()
            .map(|(_, s)| match s.pure_state() {
                Some(p) => entries(p.amplitudes().iter().copied()),
                // row-major; nalgebra stores column-major
                None => entries(s.density().matrix().transpose().iter().copied()),
            })
            .collect();
        EnsembleFile {
            dims: [d_a, d_b],
            key_len: e.key_len(),
            states,
        }
    }

    pub fn to_ensemble(&self) -> Result<KeyedEnsemble> {
        let [d_a, d_b] = self.dims;
        let d = d_a * d_b;
        if d == 0 {
            return Err(FormatError::Invalid("dims must be positive".into()));
        }
        let expected = 1usize
            .checked_shl(self.key_len as u32)
            .unwrap_or(usize::MAX);
        if self.states.len() != expected {
            return Err(FormatError::Invalid(format!(
                "key_len {} needs {expected} states, found {}",
                self.key_len,
                self.states.len()
            )));
        }
        let mut out = Vec::with_capacity(self.states.len());
        for (k, raw) in self.states.iter().enumerate() {
            let key = format_key(k as u64, self.key_len);
            let z: Vec<Complex64> = raw.iter().map(|p| Complex64::new(p[0], p[1])).collect();
            let state = if z.len() == d {
                PureState::new(CVector::from_vec(z)).and_then(|p| BipartiteState::pure(p, d_a, d_b))
            } else if z.len() == d * d {
                DensityMatrix::new(CMatrix::from_row_slice(d, d, &z))
                    .and_then(|m| BipartiteState::mixed(m, d_a, d_b))
            } else {
                return Err(FormatError::Invalid(format!(
                    "state for key {key}: {} entries, expected {d} (vector) or {} (matrix)",
                    z.len(),
                    d * d
                )));
            };
            let state =
                state.map_err(|e| FormatError::Invalid(format!("state for key {key}: {e}")))?;
            out.push((k as u64, state));
        }
        KeyedEnsemble::new(self.key_len, out).map_err(|e| FormatError::Invalid(e.to_string()))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| FormatError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Loads and validates an ensemble; every state passes the density-matrix
/// checks or the load fails naming the key.
pub fn load_ensemble(path: &Path) -> Result<KeyedEnsemble> {
    let file: EnsembleFile = parse(path, &read(path)?)?;
    file.to_ensemble()
        .map_err(|e| FormatError::Invalid(format!("{}: {e}", path.display())))
}

pub fn save_ensemble(path: &Path, e: &KeyedEnsemble) -> Result<()> {
    let text = serde_json::to_string_pretty(&EnsembleFile::from_ensemble(e)).expect("plain data");
    write(path, &text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub gate: String,
    pub targets: Vec<String>,
    #[serde(default)]
    pub controls: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundSpec {
    #[serde(default)]
    pub a: Vec<GateSpec>,
    #[serde(default)]
    pub b: Vec<GateSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegisterSpec {
    pub n_a: usize,
    #[serde(default)]
    pub t_a: usize,
    pub n_b: usize,
    #[serde(default)]
    pub t_b: usize,
    #[serde(default)]
    pub c: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub registers: RegisterSpec,
    #[serde(default)]
    pub key_len: usize,
    /// Whether `B'` also receives the key (default true).
    #[serde(default = "yes")]
    pub bob_key: bool,
    /// Defaults to the number of gates.
    #[serde(default)]
    pub gate_budget: Option<usize>,
    pub rounds: Vec<RoundSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

fn yes() -> bool {
    true
}

fn invalid(e: pseudolab::Error) -> FormatError {
    FormatError::Invalid(e.to_string())
}

fn gate_from(spec: &GateSpec) -> Result<Gate> {
    let kind: GateKind = spec.gate.parse().map_err(invalid)?;
    let [target] = spec.targets.as_slice() else {
        return Err(FormatError::Invalid(format!(
            "{}: expected exactly one target, got {}",
            spec.gate,
            spec.targets.len()
        )));
    };
    let target: Qubit = target.parse().map_err(invalid)?;
    let controls = spec
        .controls
        .iter()
        .map(|c| c.parse::<Qubit>().map_err(invalid))
        .collect::<Result<Vec<_>>>()?;
    Gate::new(kind, target, controls).map_err(invalid)
}

fn gate_spec(g: &Gate) -> GateSpec {
    GateSpec {
        gate: g.kind.name().to_string(),
        targets: vec![g.target.to_string()],
        controls: g.controls.iter().map(|q| q.to_string()).collect(),
    }
}

impl CircuitFile {
    pub fn to_map(&self) -> Result<KeyedLoccMap> {
        let r = self.registers;
        let regs = Registers {
            n_a: r.n_a,
            t_a: r.t_a,
            n_b: r.n_b,
            t_b: r.t_b,
            c: r.c,
        };
        let rounds = self
            .rounds
            .iter()
            .map(|round| {
                Ok(Round {
                    a: round.a.iter().map(gate_from).collect::<Result<_>>()?,
                    b: round.b.iter().map(gate_from).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let n: usize = rounds.iter().map(|r| r.a.len() + r.b.len()).sum();
        let circuit =
            LoccCircuit::new(regs, rounds, self.gate_budget.unwrap_or(n)).map_err(invalid)?;
        if self.key_len == 0 {
            Ok(KeyedLoccMap::unkeyed(circuit))
        } else if self.bob_key {
            KeyedLoccMap::new(circuit, self.key_len).map_err(invalid)
        } else {
            KeyedLoccMap::alice_only(circuit, self.key_len).map_err(invalid)
        }
    }

    pub fn output_registers(&self) -> Option<OutputRegisters> {
        self.output.as_ref().map(|o| OutputRegisters {
            a: o.a.clone(),
            b: o.b.clone(),
        })
    }

    pub fn from_map(map: &KeyedLoccMap, output: Option<&OutputRegisters>) -> Self {
        let r = map.base.registers();
        CircuitFile {
            registers: RegisterSpec {
                n_a: r.n_a,
                t_a: r.t_a,
                n_b: r.n_b,
                t_b: r.t_b,
                c: r.c,
            },
            key_len: map.key_len,
            bob_key: map.bob_copy || map.key_len == 0,
            gate_budget: Some(map.base.gate_budget()),
            rounds: map
                .base
                .rounds()
                .iter()
                .map(|round| RoundSpec {
                    a: round.a.iter().map(gate_spec).collect(),
                    b: round.b.iter().map(gate_spec).collect(),
                })
                .collect(),
            output: output.map(|o| OutputSpec {
                a: o.a.clone(),
                b: o.b.clone(),
            }),
        }
    }
}

pub fn load_circuit(path: &Path) -> Result<CircuitFile> {
    let file: CircuitFile = parse(path, &read(path)?)?;
    file.to_map()
        .map_err(|e| FormatError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(file)
}

pub fn save_circuit(path: &Path, file: &CircuitFile) -> Result<()> {
    write(
        path,
        &serde_json::to_string_pretty(file).expect("plain data"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use pseudolab::epfi::pauli_keyed_bell;
    use pseudolab::linalg::random::random_density_matrix;
    use pseudolab::locc::keyed_correction_circuit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mixed_ensemble() -> KeyedEnsemble {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        KeyedEnsemble::from_fn(1, |_| {
            BipartiteState::mixed(random_density_matrix(4, &mut rng), 2, 2)
        })
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        for e in [mixed_ensemble(), pauli_keyed_bell(1).unwrap()] {
            let path = dir.path().join("e.json");
            save_ensemble(&path, &e).unwrap();
            let back = load_ensemble(&path).unwrap();
            assert_eq!(back.len(), e.len());
            for ((k, a), (k2, b)) in e.iter().zip(back.iter()) {
                assert_eq!(k, k2);
                assert_eq!(a.dims(), b.dims());
                // exact equality, not approximate
                assert!(a
                    .density()
                    .matrix()
                    .iter()
                    .zip(b.density().matrix().iter())
                    .all(|(x, y)| x == y));
            }
        }
    }

    #[test]
    fn two_key_file_loads() {
        let text = r#"{ "dims": [2, 1], "key_len": 1,
            "states": [ [[1, 0], [0, 0]], [[0, 0], [0, 0], [0, 0], [1, 0]] ] }"#;
        let f: EnsembleFile = serde_json::from_str(text).unwrap();
        let e = f.to_ensemble().unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.get(1).unwrap().density().matrix()[(1, 1)].re, 1.0);
    }

    #[test]
    fn bad_trace_is_named() {
        let text = r#"{ "dims": [2, 1], "key_len": 1,
            "states": [ [[1, 0], [0, 0], [0, 0], [0, 0]], [[0.49, 0], [0, 0], [0, 0], [0.49, 0]] ] }"#;
        let f: EnsembleFile = serde_json::from_str(text).unwrap();
        let msg = f.to_ensemble().unwrap_err().to_string();
        assert!(msg.contains("trace") && msg.contains("key 1"), "{msg}");
        let short = EnsembleFile {
            dims: [2, 1],
            key_len: 1,
            states: vec![vec![[1.0, 0.0], [0.0, 0.0]]],
        };
        assert!(short
            .to_ensemble()
            .unwrap_err()
            .to_string()
            .contains("needs 2 states"));
    }

    #[test]
    fn circuit_round_trip() {
        let map = keyed_correction_circuit(1).unwrap();
        let file = CircuitFile::from_map(&map, Some(&OutputRegisters::pairs(1)));
        let text = serde_json::to_string(&file).unwrap();
        let back: CircuitFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_map().unwrap(), map);
        assert_eq!(back.output_registers(), Some(OutputRegisters::pairs(1)));

        let nonlocal = r#"{ "registers": { "n_a": 1, "n_b": 1 },
            "rounds": [ { "a": [ { "gate": "CNOT", "targets": ["B0"], "controls": ["A0"] } ] } ] }"#;
        let f: CircuitFile = serde_json::from_str(nonlocal).unwrap();
        assert!(f.to_map().unwrap_err().to_string().contains("B0"));
    }
}
