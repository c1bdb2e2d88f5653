//! Exact simulation: projector-sum (dephasing) on `C`, plus an independent
//! state-vector simulator that keeps every measurement branch.

use num_complex::Complex64;

use super::circuit::{Gate, KeyedLoccMap, LoccCircuit, Registers};
use crate::error::{Error, Result};
use crate::linalg::{tensor, BipartiteState, CMatrix, CVector, DensityMatrix};

struct Compiled {
    u: [[Complex64; 2]; 2],
    target: usize,
    mask: usize,
}

fn compile(regs: &Registers, g: &Gate) -> Compiled {
    Compiled {
        u: g.kind.base(),
        target: 1 << regs.bit(g.target),
        mask: g.controls.iter().fold(0, |m, &c| m | (1 << regs.bit(c))),
    }
}

/// `X ← U X` for the gate embedded in the full register space.
pub(crate) fn gate_left(x: &mut CMatrix, regs: &Registers, g: &Gate) {
    left(x, &compile(regs, g));
}

pub(crate) fn dephase(x: &mut CMatrix, regs: &Registers) {
    dephase_c(x, regs.c);
}

fn active(g: &Compiled, i: usize) -> bool {
    i & g.target == 0 && i & g.mask == g.mask
}

/// `X ← U X` (rows).
fn left(x: &mut CMatrix, g: &Compiled) {
    let n = x.nrows();
    for i in (0..n).filter(|&i| active(g, i)) {
        let i1 = i | g.target;
        for j in 0..x.ncols() {
            let (a, b) = (x[(i, j)], x[(i1, j)]);
            x[(i, j)] = g.u[0][0] * a + g.u[0][1] * b;
            x[(i1, j)] = g.u[1][0] * a + g.u[1][1] * b;
        }
    }
}

/// `X ← X U†` (columns).
fn right_adj(x: &mut CMatrix, g: &Compiled) {
    let n = x.ncols();
    for j in (0..n).filter(|&j| active(g, j)) {
        let j1 = j | g.target;
        for i in 0..x.nrows() {
            let (a, b) = (x[(i, j)], x[(i, j1)]);
            x[(i, j)] = a * g.u[0][0].conj() + b * g.u[0][1].conj();
            x[(i, j1)] = a * g.u[1][0].conj() + b * g.u[1][1].conj();
        }
    }
}

fn apply_vec(v: &mut CVector, g: &Compiled) {
    for i in (0..v.len()).filter(|&i| active(g, i)) {
        let i1 = i | g.target;
        let (a, b) = (v[i], v[i1]);
        v[i] = g.u[0][0] * a + g.u[0][1] * b;
        v[i1] = g.u[1][0] * a + g.u[1][1] * b;
    }
}

fn dephase_c(x: &mut CMatrix, c: usize) {
    let mask = (1usize << c) - 1;
    if c == 0 {
        return;
    }
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if i & mask != j & mask {
                x[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Global index of `(a, b)` with ancillas holding `key` and `C = 0`.
fn embed_index(regs: &Registers, a: usize, b: usize, key: u64, key_lens: (usize, usize)) -> usize {
    let anc_a = (key as usize) << (regs.t_a - key_lens.0);
    let anc_b = if key_lens.1 == 0 {
        0
    } else {
        (key as usize) << (regs.t_b - key_lens.1)
    };
    let mut idx = a;
    idx = (idx << regs.t_a) | anc_a;
    idx = (idx << regs.n_b) | b;
    idx = (idx << regs.t_b) | anc_b;
    idx << regs.c
}

fn check_input(regs: &Registers, d_a: usize, d_b: usize) -> Result<()> {
    if d_a != 1 << regs.n_a || d_b != 1 << regs.n_b {
        return Err(Error::DimensionMismatch {
            expected: (1 << regs.n_a) * (1 << regs.n_b),
            found: d_a * d_b,
        });
    }
    Ok(())
}

/// Applies the circuit to an arbitrary operator on `A ⊗ B` (linear
/// extension of the channel); output on `AA' ⊗ BB'`. `key_lens` are the key
/// bits loaded on `A'` and `B'`.
pub fn apply_operator(
    circuit: &LoccCircuit,
    x: &CMatrix,
    key: u64,
    key_lens: (usize, usize),
) -> Result<CMatrix> {
    let regs = circuit.registers();
    let d_b = 1usize << regs.n_b;
    let (dim_in, n) = (x.nrows(), 1usize << regs.total());
    if dim_in != (1 << regs.n_a) * d_b {
        return Err(Error::DimensionMismatch {
            expected: (1 << regs.n_a) * d_b,
            found: dim_in,
        });
    }
    let mut g = CMatrix::zeros(n, n);
    let map: Vec<usize> = (0..dim_in)
        .map(|i| embed_index(&regs, i / d_b, i % d_b, key, key_lens))
        .collect();
    for i in 0..dim_in {
        for j in 0..dim_in {
            g[(map[i], map[j])] = x[(i, j)];
        }
    }
    for round in circuit.rounds() {
        for gates in [&round.a, &round.b] {
            for gate in gates {
                let c = compile(&regs, gate);
                left(&mut g, &c);
                right_adj(&mut g, &c);
            }
            dephase_c(&mut g, regs.c);
        }
    }
    tensor::partial_trace_keep(&g, &[n >> regs.c, 1 << regs.c], &[0])
}

fn output_state(regs: &Registers, m: CMatrix) -> Result<BipartiteState> {
    BipartiteState::mixed(
        DensityMatrix::from_numerical(m)?,
        1 << (regs.n_a + regs.t_a),
        1 << (regs.n_b + regs.t_b),
    )
}

/// Exact output of the LOCC map, bipartition `AA' : BB'`.
pub fn apply_locc(circuit: &LoccCircuit, state: &BipartiteState) -> Result<BipartiteState> {
    let regs = circuit.registers();
    let (d_a, d_b) = state.dims();
    check_input(&regs, d_a, d_b)?;
    output_state(
        &regs,
        apply_operator(circuit, state.density().matrix(), 0, (0, 0))?,
    )
}

/// Keyed map on `|k⟩⟨k|_{A'} ⊗ ρ ⊗ |k⟩⟨k|_{B'}` (no `B'` copy when
/// `bob_copy` is off).
pub fn apply_keyed(map: &KeyedLoccMap, key: u64, state: &BipartiteState) -> Result<BipartiteState> {
    if key >= 1u64 << map.key_len {
        return Err(Error::InvalidKey {
            key,
            key_len: map.key_len,
        });
    }
    let regs = map.base.registers();
    let (d_a, d_b) = state.dims();
    check_input(&regs, d_a, d_b)?;
    output_state(
        &regs,
        apply_operator(&map.base, state.density().matrix(), key, map.key_lens())?,
    )
}

/// Same channel, evaluated by following every measurement outcome of `C`
/// on state vectors (input split into its eigenvectors) and summing the
/// branches.
pub fn apply_locc_branches(
    circuit: &LoccCircuit,
    state: &BipartiteState,
) -> Result<BipartiteState> {
    let regs = circuit.registers();
    let (d_a, d_b) = state.dims();
    check_input(&regs, d_a, d_b)?;
    let n = 1usize << regs.total();
    let eig = state.density().eigen();
    let mut branches: Vec<CVector> = Vec::new();
    for (k, &p) in eig.values.iter().enumerate().filter(|(_, &p)| p > 0.0) {
        let mut v = CVector::zeros(n);
        for i in 0..state.dim() {
            v[embed_index(&regs, i / d_b, i % d_b, 0, (0, 0))] = eig.vectors[(i, k)] * p.sqrt();
        }
        branches.push(v);
    }
    let outcomes = 1usize << regs.c;
    let mask = outcomes - 1;
    for round in circuit.rounds() {
        for gates in [&round.a, &round.b] {
            let compiled: Vec<_> = gates.iter().map(|g| compile(&regs, g)).collect();
            let mut next = Vec::with_capacity(branches.len() * outcomes);
            for mut v in branches {
                for c in &compiled {
                    apply_vec(&mut v, c);
                }
                for outcome in 0..outcomes {
                    let proj = CVector::from_fn(n, |i, _| {
                        if i & mask == outcome {
                            v[i]
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    });
                    if proj.norm_squared() > 0.0 {
                        next.push(proj);
                    }
                }
            }
            branches = next;
        }
    }
    let mut out = CMatrix::zeros(n, n);
    for v in &branches {
        out += v * v.adjoint();
    }
    let m = tensor::partial_trace_keep(&out, &[n >> regs.c, outcomes], &[0])?;
    output_state(&regs, m)
}

/// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Γ(|i⟩⟨j|)` of the map on `A ⊗ B`.
pub fn choi_matrix(circuit: &LoccCircuit) -> Result<CMatrix> {
    let regs = circuit.registers();
    let d_in = 1usize << (regs.n_a + regs.n_b);
    let d_out = 1usize << (regs.n_a + regs.t_a + regs.n_b + regs.t_b);
    let mut choi = CMatrix::zeros(d_in * d_out, d_in * d_out);
    for i in 0..d_in {
        for j in 0..d_in {
            let mut e = CMatrix::zeros(d_in, d_in);
            e[(i, j)] = Complex64::new(1.0, 0.0);
            let out = apply_operator(circuit, &e, 0, (0, 0))?;
            choi.view_mut((i * d_out, j * d_out), (d_out, d_out))
                .copy_from(&out);
        }
    }
    Ok(choi)
}

/// Qubits of an output side to keep, in the requested order. Indices count
/// `A` then `A'` (or `B` then `B'`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputRegisters {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl OutputRegisters {
    /// The first `m` qubits on each side, paired in order.
    pub fn pairs(m: usize) -> Self {
        OutputRegisters {
            a: (0..m).collect(),
            b: (0..m).collect(),
        }
    }

    /// All of `A` and all of `B`, ancillas dropped.
    pub fn data(regs: &Registers) -> Self {
        OutputRegisters {
            a: (0..regs.n_a).collect(),
            b: (0..regs.n_b).collect(),
        }
    }
}

/// Reduces an `AA' : BB'` output to the designated qubits.
pub fn select_output(state: &BipartiteState, out: &OutputRegisters) -> Result<BipartiteState> {
    let (d_a, d_b) = state.dims();
    let (q_a, q_b) = (d_a.trailing_zeros() as usize, d_b.trailing_zeros() as usize);
    let mut seen_a = vec![false; q_a];
    let mut seen_b = vec![false; q_b];
    for (idx, n, seen, side) in [
        (&out.a, q_a, &mut seen_a, "A"),
        (&out.b, q_b, &mut seen_b, "B"),
    ] {
        for &i in idx {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::BadOutputDesignation(format!(
                    "qubit {i} on side {side} is out of range or repeated ({n} available)"
                )));
            }
        }
    }
    let dims = vec![2usize; q_a + q_b];
    let wanted: Vec<usize> = out
        .a
        .iter()
        .copied()
        .chain(out.b.iter().map(|&i| q_a + i))
        .collect();
    let mut sorted = wanted.clone();
    sorted.sort_unstable();
    let reduced = tensor::partial_trace_keep(state.density().matrix(), &dims, &sorted)?;
    let perm: Vec<usize> = wanted
        .iter()
        .map(|w| sorted.binary_search(w).expect("present"))
        .collect();
    let reduced = tensor::permute_subsystems(&reduced, &vec![2; sorted.len()], &perm)?;
    BipartiteState::mixed(
        DensityMatrix::from_numerical(reduced)?,
        1 << out.a.len(),
        1 << out.b.len(),
    )
}
