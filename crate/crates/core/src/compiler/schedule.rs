//! ASAP list scheduling into discrete time slices.

use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, QuantumCircuit};
use crate::device::DeviceModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateTiming {
    pub start: usize,
    /// Zero for barriers.
    pub duration: usize,
}

impl GateTiming {
    pub fn end(&self) -> usize {
        self.start + self.duration
    }

    pub fn overlaps(&self, other: &GateTiming) -> bool {
        self.start < other.end() && other.start < self.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// Gate indices active during each slice.
    pub slices: Vec<Vec<usize>>,
    pub duration: usize,
    pub two_qubit_per_slice: Vec<usize>,
    /// Per-gate placement, indexed like `circuit.gates`.
    pub timings: Vec<GateTiming>,
    /// Qubits of each scheduled gate; lets the simulator reject a schedule
    /// built for a different circuit.
    pub gate_qubits: Vec<Vec<usize>>,
    /// Multi-qubit gates that overlap in time with another multi-qubit gate
    /// on an adjacent coupler.
    pub crosstalk_exposed: Vec<bool>,
}

impl Schedule {
    pub fn matches(&self, circuit: &QuantumCircuit) -> bool {
        self.gate_qubits.len() == circuit.gates.len()
            && self.gate_qubits.iter().zip(&circuit.gates).all(|(q, g)| *q == g.qubits)
    }

    pub fn max_two_qubit_concurrency(&self) -> usize {
        self.two_qubit_per_slice.iter().copied().max().unwrap_or(0)
    }
}

/// Greedy ASAP placement in gate order. Single-qubit gates and measurements
/// take `slice_weights.one_qubit` slices, multi-qubit gates
/// `slice_weights.two_qubit`; when the device has a zone capacity, a
/// multi-qubit gate is pushed later until every slice it covers has a free
/// zone.
pub fn schedule_circuit(circuit: &QuantumCircuit, device: &DeviceModel) -> Schedule {
    let w1 = device.slice_weights.one_qubit;
    let w2 = device.slice_weights.two_qubit;
    let mut avail = vec![0usize; circuit.n_qubits];
    let mut load: Vec<usize> = Vec::new();
    let mut timings = Vec::with_capacity(circuit.gates.len());

    for g in &circuit.gates {
        let ready = g.qubits.iter().map(|&q| avail[q]).max().unwrap_or(0);
        if g.kind == GateKind::Barrier {
            for &q in &g.qubits {
                avail[q] = ready;
            }
            timings.push(GateTiming {
                start: ready,
                duration: 0,
            });
            continue;
        }
        let multi = g.is_multi_qubit();
        let duration = if multi { w2 } else { w1 };
        let mut start = ready;
        if let (true, Some(cap)) = (multi, device.zone_capacity) {
            while (start..start + duration).any(|t| load.get(t).copied().unwrap_or(0) >= cap) {
                start += 1;
            }
        }
        if multi {
            if load.len() < start + duration {
                load.resize(start + duration, 0);
            }
            for l in &mut load[start..start + duration] {
                *l += 1;
            }
        }
        for &q in &g.qubits {
            avail[q] = start + duration;
        }
        timings.push(GateTiming { start, duration });
    }

    let duration = timings.iter().map(GateTiming::end).max().unwrap_or(0);
    let mut slices = vec![Vec::new(); duration];
    for (i, t) in timings.iter().enumerate() {
        for slice in &mut slices[t.start..t.end()] {
            slice.push(i);
        }
    }
    load.resize(duration, 0);

    let adjacency = device.adjacency();
    let coupled = |a: usize, b: usize| adjacency.get(a).and_then(|row| row.get(b)).copied().unwrap_or(false);
    let mut exposed = vec![false; circuit.gates.len()];
    for slice in &slices {
        let multi: Vec<usize> = slice
            .iter()
            .copied()
            .filter(|&i| circuit.gates[i].is_multi_qubit())
            .collect();
        for (k, &i) in multi.iter().enumerate() {
            for &j in &multi[k + 1..] {
                let (qi, qj) = (&circuit.gates[i].qubits, &circuit.gates[j].qubits);
                let adjacent = qi.iter().any(|&a| qj.iter().any(|&b| coupled(a, b)));
                if adjacent {
                    exposed[i] = true;
                    exposed[j] = true;
                }
            }
        }
    }

    Schedule {
        slices,
        duration,
        two_qubit_per_slice: load,
        gate_qubits: circuit.gates.iter().map(|g| g.qubits.clone()).collect(),
        timings,
        crosstalk_exposed: exposed,
    }
}
