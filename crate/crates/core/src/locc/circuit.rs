use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Total simulated qubits (all registers) above which circuits are refused.
pub const MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Register {
    A,
    /// `A'`, Alice's ancillas.
    AncA,
    B,
    /// `B'`, Bob's ancillas.
    AncB,
    /// Classical communication register.
    C,
}

impl Register {
    fn tag(&self) -> &'static str {
        match self {
            Register::A => "A",
            Register::AncA => "Ap",
            Register::B => "B",
            Register::AncB => "Bp",
            Register::C => "C",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qubit {
    pub reg: Register,
    pub index: usize,
}

impl Qubit {
    pub const fn new(reg: Register, index: usize) -> Self {
        Qubit { reg, index }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.reg.tag(), self.index)
    }
}

impl FromStr for Qubit {
    type Err = Error;

    /// `A0`, `Ap1`, `B2`, `Bp0`, `C0`.
    fn from_str(s: &str) -> Result<Self> {
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (tag, idx) = s.split_at(split);
        let reg = match tag {
            "A" => Register::A,
            "Ap" | "A'" => Register::AncA,
            "B" => Register::B,
            "Bp" | "B'" => Register::AncB,
            "C" => Register::C,
            _ => {
                return Err(Error::InvalidCircuit(format!(
                    "unknown register in qubit `{s}`"
                )))
            }
        };
        let index = idx
            .parse()
            .map_err(|_| Error::InvalidCircuit(format!("bad qubit index in `{s}`")))?;
        Ok(Qubit { reg, index })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Z,
    S,
    Cnot,
    Cz,
    Toffoli,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::H,
        GateKind::X,
        GateKind::Z,
        GateKind::S,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Toffoli,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Toffoli => "TOFFOLI",
        }
    }

    /// Number of controls the gate requires; `None` means any number
    /// (classically controlled single-qubit gates).
    fn controls(&self) -> Option<usize> {
        match self {
            GateKind::H | GateKind::X | GateKind::Z | GateKind::S => None,
            GateKind::Cnot | GateKind::Cz => Some(1),
            GateKind::Toffoli => Some(2),
        }
    }

    /// The single-qubit operator applied to the target.
    pub fn base(&self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            GateKind::H => [[s, s], [s, -s]],
            GateKind::X | GateKind::Cnot | GateKind::Toffoli => [[o, l], [l, o]],
            GateKind::Z | GateKind::Cz => [[l, o], [o, -l]],
            GateKind::S => [[l, o], [o, Complex64::new(0.0, 1.0)]],
        }
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidCircuit(format!("unknown gate `{s}`")))
    }
}

/// A (possibly controlled) single-target gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub target: Qubit,
    pub controls: Vec<Qubit>,
}

impl Gate {
    pub fn new(kind: GateKind, target: Qubit, controls: Vec<Qubit>) -> Result<Self> {
        if let Some(n) = kind.controls() {
            if controls.len() != n {
                return Err(Error::InvalidCircuit(format!(
                    "{} takes {n} control(s), got {}",
                    kind.name(),
                    controls.len()
                )));
            }
        }
        let mut all = controls.clone();
        all.push(target);
        all.sort();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCircuit(format!(
                "{} repeats a qubit",
                kind.name()
            )));
        }
        Ok(Gate {
            kind,
            target,
            controls,
        })
    }

    pub fn single(kind: GateKind, target: Qubit) -> Self {
        Gate::new(kind, target, vec![]).expect("single-qubit gate")
    }

    pub fn cnot(control: Qubit, target: Qubit) -> Result<Self> {
        Gate::new(GateKind::Cnot, target, vec![control])
    }

    pub fn cz(control: Qubit, target: Qubit) -> Result<Self> {
        Gate::new(GateKind::Cz, target, vec![control])
    }

    pub fn qubits(&self) -> impl Iterator<Item = &Qubit> {
        self.controls.iter().chain(std::iter::once(&self.target))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.name(), self.target)?;
        for c in &self.controls {
            write!(f, " c:{c}")?;
        }
        Ok(())
    }
}

/// Alice's circuit then Bob's, each followed by a measurement of `C`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Round {
    pub a: Vec<Gate>,
    pub b: Vec<Gate>,
}

/// Register sizes in qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Registers {
    pub n_a: usize,
    pub t_a: usize,
    pub n_b: usize,
    pub t_b: usize,
    pub c: usize,
}

impl Registers {
    pub fn total(&self) -> usize {
        self.n_a + self.t_a + self.n_b + self.t_b + self.c
    }

    pub fn size(&self, reg: Register) -> usize {
        match reg {
            Register::A => self.n_a,
            Register::AncA => self.t_a,
            Register::B => self.n_b,
            Register::AncB => self.t_b,
            Register::C => self.c,
        }
    }

    /// Global position, most significant first, in the order
    /// `A, A', B, B', C`.
    pub fn position(&self, q: Qubit) -> usize {
        let off = match q.reg {
            Register::A => 0,
            Register::AncA => self.n_a,
            Register::B => self.n_a + self.t_a,
            Register::AncB => self.n_a + self.t_a + self.n_b,
            Register::C => self.n_a + self.t_a + self.n_b + self.t_b,
        };
        off + q.index
    }

    /// Bit index (LSB = 0) of `q` in a global basis index.
    pub fn bit(&self, q: Qubit) -> usize {
        self.total() - 1 - self.position(q)
    }
}

/// Round-based LOCC circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct LoccCircuit {
    regs: Registers,
    rounds: Vec<Round>,
    gate_budget: usize,
}

impl LoccCircuit {
    pub fn new(regs: Registers, rounds: Vec<Round>, gate_budget: usize) -> Result<Self> {
        if regs.total() > MAX_QUBITS {
            return Err(Error::DimensionBlowup {
                what: "LOCC registers".into(),
                dim: 1 << regs.total(),
                limit: 1 << MAX_QUBITS,
            });
        }
        let mut used = 0;
        for round in &rounds {
            for (side, gates, allowed) in [
                ("A", &round.a, [Register::A, Register::AncA, Register::C]),
                ("B", &round.b, [Register::B, Register::AncB, Register::C]),
            ] {
                for g in gates {
                    for q in g.qubits() {
                        if !allowed.contains(&q.reg) {
                            return Err(Error::LocalityViolation {
                                gate: g.to_string(),
                                register: q.to_string(),
                                side: side.into(),
                            });
                        }
                        if q.index >= regs.size(q.reg) {
                            return Err(Error::InvalidCircuit(format!(
                                "{g}: qubit {q} is not declared"
                            )));
                        }
                    }
                }
                used += gates.len();
            }
        }
        if used > gate_budget {
            return Err(Error::GateBudgetExceeded {
                used,
                budget: gate_budget,
            });
        }
        Ok(LoccCircuit {
            regs,
            rounds,
            gate_budget,
        })
    }

    /// No rounds, no gates.
    pub fn empty(regs: Registers) -> Result<Self> {
        Self::new(regs, vec![], 0)
    }

    /// A single round.
    pub fn one_round(regs: Registers, a: Vec<Gate>, b: Vec<Gate>) -> Result<Self> {
        let n = a.len() + b.len();
        Self::new(regs, vec![Round { a, b }], n)
    }

    pub fn registers(&self) -> Registers {
        self.regs
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn gate_budget(&self) -> usize {
        self.gate_budget
    }

    pub fn gate_count(&self) -> usize {
        self.rounds.iter().map(|r| r.a.len() + r.b.len()).sum()
    }

    pub fn measurement_rounds(&self) -> usize {
        self.rounds.len()
    }
}

/// Circuit with the key registers loaded with `|k⟩` (first `key_len`
/// qubits of `A'` and, unless `bob_copy` is off, of `B'`, most significant
/// bit first).
#[derive(Debug, Clone, PartialEq)]
pub struct KeyedLoccMap {
    pub base: LoccCircuit,
    pub key_len: usize,
    pub bob_copy: bool,
}

impl KeyedLoccMap {
    pub fn new(base: LoccCircuit, key_len: usize) -> Result<Self> {
        let r = base.registers();
        if r.t_a < key_len || r.t_b < key_len {
            return Err(Error::InvalidCircuit(format!(
                "key of {key_len} bits does not fit ancillas (t_A = {}, t_B = {})",
                r.t_a, r.t_b
            )));
        }
        Ok(KeyedLoccMap {
            base,
            key_len,
            bob_copy: true,
        })
    }

    /// Key loaded on `A'` only; for circuits where Bob never reads it.
    pub fn alice_only(base: LoccCircuit, key_len: usize) -> Result<Self> {
        let t_a = base.registers().t_a;
        if t_a < key_len {
            return Err(Error::InvalidCircuit(format!(
                "key of {key_len} bits does not fit A's ancilla (t_A = {t_a})"
            )));
        }
        Ok(KeyedLoccMap {
            base,
            key_len,
            bob_copy: false,
        })
    }

    pub fn unkeyed(base: LoccCircuit) -> Self {
        KeyedLoccMap {
            base,
            key_len: 0,
            bob_copy: false,
        }
    }

    /// Key bits written into `A'` and `B'`.
    pub fn key_lens(&self) -> (usize, usize) {
        (self.key_len, if self.bob_copy { self.key_len } else { 0 })
    }
}

/// Local gates of the toy set available on one side.
pub fn local_gates(side_qubits: &[Qubit]) -> Vec<Gate> {
    let mut out = Vec::new();
    for &q in side_qubits {
        for k in [GateKind::H, GateKind::X, GateKind::Z, GateKind::S] {
            out.push(Gate::single(k, q));
        }
    }
    for &c in side_qubits {
        for &t in side_qubits {
            if c != t {
                out.push(Gate::cnot(c, t).expect("distinct"));
                if c < t {
                    out.push(Gate::cz(c, t).expect("distinct"));
                }
                for &c2 in side_qubits {
                    if c < c2 && c2 != t {
                        out.push(Gate::new(GateKind::Toffoli, t, vec![c, c2]).expect("distinct"));
                    }
                }
            }
        }
    }
    out
}

pub fn side_qubits(regs: &Registers, alice: bool) -> Vec<Qubit> {
    let (data, anc) = if alice {
        (Register::A, Register::AncA)
    } else {
        (Register::B, Register::AncB)
    };
    let mut qs = Vec::new();
    for reg in [data, anc, Register::C] {
        qs.extend((0..regs.size(reg)).map(|i| Qubit::new(reg, i)));
    }
    qs
}

/// Random circuit from the toy gate set with `gates_per_side` gates on each
/// side of each round.
pub fn random_circuit<R: Rng + ?Sized>(
    regs: Registers,
    rounds: usize,
    gates_per_side: usize,
    rng: &mut R,
) -> Result<LoccCircuit> {
    let pools = [
        local_gates(&side_qubits(&regs, true)),
        local_gates(&side_qubits(&regs, false)),
    ];
    let mut pick = |p: &Vec<Gate>| -> Vec<Gate> {
        if p.is_empty() {
            return vec![];
        }
        (0..gates_per_side)
            .map(|_| p[rng.random_range(0..p.len())].clone())
            .collect()
    };
    let rs = (0..rounds)
        .map(|_| Round {
            a: pick(&pools[0]),
            b: pick(&pools[1]),
        })
        .collect();
    LoccCircuit::new(regs, rs, 2 * rounds * gates_per_side)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regs() -> Registers {
        Registers {
            n_a: 1,
            t_a: 1,
            n_b: 1,
            t_b: 0,
            c: 1,
        }
    }

    #[test]
    fn qubit_names_round_trip() {
        for s in ["A0", "Ap1", "B3", "Bp0", "C0"] {
            assert_eq!(s.parse::<Qubit>().unwrap().to_string(), s);
        }
        assert!("D0".parse::<Qubit>().is_err());
        assert!("A".parse::<Qubit>().is_err());
        assert_eq!("cnot".parse::<GateKind>().unwrap(), GateKind::Cnot);
    }

    #[test]
    fn positions_follow_register_order() {
        let r = regs();
        assert_eq!(r.position(Qubit::new(Register::A, 0)), 0);
        assert_eq!(r.position(Qubit::new(Register::AncA, 0)), 1);
        assert_eq!(r.position(Qubit::new(Register::B, 0)), 2);
        assert_eq!(r.position(Qubit::new(Register::C, 0)), 3);
        assert_eq!(r.bit(Qubit::new(Register::C, 0)), 0);
    }

    #[test]
    fn locality_and_budget_are_enforced() {
        let a0 = Qubit::new(Register::A, 0);
        let b0 = Qubit::new(Register::B, 0);
        let c0 = Qubit::new(Register::C, 0);
        let bad = Round {
            a: vec![Gate::cnot(a0, b0).unwrap()],
            b: vec![],
        };
        assert!(matches!(
            LoccCircuit::new(regs(), vec![bad], 5),
            Err(Error::LocalityViolation { .. })
        ));
        let ok = Round {
            a: vec![Gate::cnot(a0, c0).unwrap()],
            b: vec![Gate::cnot(c0, b0).unwrap()],
        };
        assert!(LoccCircuit::new(regs(), vec![ok.clone()], 2).is_ok());
        assert!(matches!(
            LoccCircuit::new(regs(), vec![ok], 1),
            Err(Error::GateBudgetExceeded { used: 2, budget: 1 })
        ));
        let undeclared = Round {
            a: vec![Gate::single(GateKind::H, Qubit::new(Register::A, 3))],
            b: vec![],
        };
        assert!(LoccCircuit::new(regs(), vec![undeclared], 5).is_err());
        assert!(Gate::cnot(a0, a0).is_err());
        assert!(Gate::new(GateKind::Toffoli, a0, vec![c0]).is_err());
    }

    #[test]
    fn toy_gate_pool_sizes() {
        let r = regs();
        // A0, Ap0, C0: 12 single, 6 CNOT, 3 CZ, 3 Toffoli
        assert_eq!(local_gates(&side_qubits(&r, true)).len(), 24);
        // B0, C0: 8 single, 2 CNOT, 1 CZ
        assert_eq!(local_gates(&side_qubits(&r, false)).len(), 11);
    }
}
