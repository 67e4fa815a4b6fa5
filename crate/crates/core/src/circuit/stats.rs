use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{GateKind, QuantumCircuit};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub n_qubits: usize,
    /// Unitary gates; measurements and barriers are not counted.
    pub total_gates: usize,
    /// Two-qubit entanglers (CX, ZZ, SWAP).
    pub cx_count: usize,
    pub depth: usize,
    /// Sorted `(low, high)` pairs of qubits sharing a multi-qubit gate.
    pub interaction_graph: BTreeSet<(usize, usize)>,
}

/// Counts over the gate list as given (no decomposition). Depth is the
/// length of the greedy ASAP layering with unit-time unitary gates;
/// barriers align their qubits without taking a layer.
pub fn circuit_stats(circuit: &QuantumCircuit) -> CircuitStats {
    let mut level = vec![0usize; circuit.n_qubits];
    let mut stats = CircuitStats {
        n_qubits: circuit.n_qubits,
        total_gates: 0,
        cx_count: 0,
        depth: 0,
        interaction_graph: BTreeSet::new(),
    };
    for g in &circuit.gates {
        match g.kind {
            GateKind::Measure { .. } => continue,
            GateKind::Barrier => {
                let top = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
                for &q in &g.qubits {
                    level[q] = top;
                }
                continue;
            }
            _ => {}
        }
        stats.total_gates += 1;
        if g.is_two_qubit() {
            stats.cx_count += 1;
        }
        if g.is_multi_qubit() {
            for (i, &a) in g.qubits.iter().enumerate() {
                for &b in &g.qubits[i + 1..] {
                    stats.interaction_graph.insert((a.min(b), a.max(b)));
                }
            }
        }
        let layer = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in &g.qubits {
            level[q] = layer;
        }
        stats.depth = stats.depth.max(layer);
    }
    stats
}
