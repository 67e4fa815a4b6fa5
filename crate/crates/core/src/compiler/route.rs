//! SWAP-chain routing of a logical circuit onto a connected partition.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::subsets::is_connected;
use super::CompileError;
use crate::circuit::{expand_ccx, rebase_to_basis, Basis, Gate, QuantumCircuit};
use crate::device::DeviceModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutedCircuit {
    /// Circuit over all device qubits; every multi-qubit gate sits on a
    /// coupling edge.
    pub circuit: QuantumCircuit,
    pub initial_layout: Vec<usize>,
    /// Physical home of each logical qubit after the last gate.
    pub final_layout: Vec<usize>,
    pub swaps: usize,
}

pub(crate) struct Topology {
    pub adjacency: Vec<Vec<bool>>,
    pub neighbors: Vec<Vec<usize>>,
}

impl Topology {
    pub fn of(device: &DeviceModel) -> Self {
        Self {
            adjacency: device.adjacency(),
            neighbors: device.neighbors(),
        }
    }

    /// Shortest path from `from` to `to` through `region` (BFS, neighbours
    /// visited in ascending order).
    fn path(&self, from: usize, to: usize, region: &[bool]) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.neighbors.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &u in &self.neighbors[v] {
                if region[u] && prev[u] == usize::MAX {
                    prev[u] = v;
                    queue.push_back(u);
                }
            }
        }
        None
    }
}

pub(crate) enum Step {
    Gate(Gate),
    Swap(usize, usize),
}

/// Greedy routing core shared by the router and partition scoring. Returns
/// the final layout and the number of SWAPs, or `None` once the count would
/// exceed `swap_limit`.
pub(crate) fn route_core(
    gates: &[Gate],
    layout: &[usize],
    topo: &Topology,
    swap_limit: usize,
    mut emit: impl FnMut(Step),
) -> Option<(Vec<usize>, usize)> {
    let n_phys = topo.neighbors.len();
    let mut region = vec![false; n_phys];
    let mut owner = vec![usize::MAX; n_phys];
    for (l, &p) in layout.iter().enumerate() {
        region[p] = true;
        owner[p] = l;
    }
    let mut layout = layout.to_vec();
    let mut swaps = 0;
    for g in gates {
        if g.is_two_qubit() {
            let (pa, pb) = (layout[g.qubits[0]], layout[g.qubits[1]]);
            if !topo.adjacency[pa][pb] {
                let path = topo.path(pa, pb, &region)?;
                for w in path.windows(2).take(path.len() - 2) {
                    let (x, y) = (w[0], w[1]);
                    swaps += 1;
                    if swaps > swap_limit {
                        return None;
                    }
                    emit(Step::Swap(x, y));
                    owner.swap(x, y);
                    layout[owner[x]] = x;
                    layout[owner[y]] = y;
                }
            }
        }
        let qubits = g.qubits.iter().map(|&q| layout[q]).collect::<Vec<_>>();
        emit(Step::Gate(Gate::new(g.kind, qubits)));
    }
    Some((layout, swaps))
}

pub(crate) fn check_embedding(
    n_logical: usize,
    embedding: &[usize],
    device: &DeviceModel,
    topo: &Topology,
) -> Result<(), CompileError> {
    if embedding.len() != n_logical {
        return Err(CompileError::SizeMismatch {
            expected: n_logical,
            got: embedding.len(),
        });
    }
    for (i, &p) in embedding.iter().enumerate() {
        if p >= device.n_qubits {
            return Err(CompileError::InvalidEmbedding(format!(
                "physical qubit {p} is outside the {}-qubit device",
                device.n_qubits
            )));
        }
        if embedding[..i].contains(&p) {
            return Err(CompileError::InvalidEmbedding(format!(
                "physical qubit {p} is used twice"
            )));
        }
    }
    if !is_connected(&topo.neighbors, embedding) {
        return Err(CompileError::DisconnectedPartition(embedding.to_vec()));
    }
    Ok(())
}

fn swap_gates(x: usize, y: usize, basis: Basis) -> Vec<Gate> {
    let mut c = QuantumCircuit::new("swap", x.max(y) + 1, 0);
    c.gates = vec![Gate::cx(x, y), Gate::cx(y, x), Gate::cx(x, y)];
    rebase_to_basis(&c, basis).gates
}

/// Places logical qubit `i` on `embedding[i]` and inserts SWAP chains (three
/// CX each, in the device basis) along shortest paths inside the partition
/// whenever a two-qubit gate spans uncoupled qubits. Toffolis are expanded
/// first.
pub fn route_to_partition(
    circuit: &QuantumCircuit,
    embedding: &[usize],
    device: &DeviceModel,
) -> Result<RoutedCircuit, CompileError> {
    circuit.validate()?;
    let topo = Topology::of(device);
    check_embedding(circuit.n_qubits, embedding, device, &topo)?;
    let logical = expand_ccx(circuit);
    let mut out = QuantumCircuit::new(circuit.name.clone(), device.n_qubits, circuit.n_cbits);
    let (final_layout, swaps) = route_core(&logical.gates, embedding, &topo, usize::MAX, |step| match step {
        Step::Gate(g) => out.gates.push(g),
        Step::Swap(x, y) => out.gates.extend(swap_gates(x, y, device.basis)),
    })
    .ok_or_else(|| CompileError::DisconnectedPartition(embedding.to_vec()))?;
    Ok(RoutedCircuit {
        circuit: out,
        initial_layout: embedding.to_vec(),
        final_layout,
        swaps,
    })
}
