//! Round-based LOCC circuits: Alice acts on `A, A', C`, `C` is measured,
//! Bob acts on `B, B', C`, `C` is measured, repeated per round. Measurements
//! are simulated as dephasing of `C`, so outputs are exact mixtures over all
//! classical branches.

mod certificates;
mod circuit;
mod locked;
mod sim;

pub use certificates::{
    bell_fidelity, cost_deficit, distillation_deficit, keyed_correction_circuit,
    keyed_preparation_circuit, DeficitReport, DistillationCertificate,
};
pub use circuit::{
    local_gates, random_circuit, side_qubits, Gate, GateKind, KeyedLoccMap, LoccCircuit, Qubit,
    Register, Registers, Round, MAX_QUBITS,
};
pub use locked::{
    default_enumeration_depth, locked_entanglement_demo, locked_entanglement_demo_with_depth,
    LockedDemoReport, MAX_DEMO_PAIRS,
};
pub use sim::{
    apply_keyed, apply_locc, apply_locc_branches, apply_operator, choi_matrix, select_output,
    OutputRegisters,
};
