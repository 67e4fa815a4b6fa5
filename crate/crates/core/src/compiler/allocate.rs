//! Greedy fidelity-scored partition allocation.

use serde::{Deserialize, Serialize};

use super::route::{check_embedding, route_core, Step, Topology};
use super::subsets::connected_subsets;
use super::CompileError;
use crate::circuit::{expand_ccx, rebase_to_basis, QuantumCircuit};
use crate::device::{DeviceModel, GateCounts};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramPlacement {
    pub circuit: String,
    /// `embedding[logical] = physical`.
    pub embedding: Vec<usize>,
    pub score: f64,
    pub swaps: usize,
}

/// Placements are listed in input order, not allocation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub device: String,
    pub programs: Vec<ProgramPlacement>,
}

impl Allocation {
    pub fn embeddings(&self) -> Vec<Vec<usize>> {
        self.programs.iter().map(|p| p.embedding.clone()).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.programs.iter().map(|p| p.score).collect()
    }
}

/// A program prepared for scoring: CCX expanded, rebased, gate counts taken.
struct Prepared {
    gates: Vec<crate::circuit::Gate>,
    counts: GateCounts,
    n_qubits: usize,
}

impl Prepared {
    fn new(circuit: &QuantumCircuit, device: &DeviceModel) -> Result<Self, CompileError> {
        circuit.validate()?;
        let rebased = rebase_to_basis(circuit, device.basis);
        Ok(Self {
            gates: expand_ccx(circuit).gates,
            counts: GateCounts::of(&rebased),
            n_qubits: circuit.n_qubits,
        })
    }

    fn score(&self, device: &DeviceModel, swaps: usize) -> f64 {
        (1.0 - device.err_1q).powi(self.counts.one_qubit as i32)
            * (1.0 - device.err_2q).powi((self.counts.two_qubit + 3 * swaps) as i32)
            * (1.0 - device.err_ro).powi(self.counts.measurements as i32)
    }

    /// Fewest SWAPs over all logical→physical assignments of `subset`,
    /// searched in lexicographic permutation order; the first assignment
    /// reaching the minimum wins.
    fn best_embedding(&self, subset: &[usize], topo: &Topology) -> (Vec<usize>, usize) {
        let mut perm: Vec<usize> = subset.to_vec();
        perm.sort_unstable();
        let mut best: Option<(Vec<usize>, usize)> = None;
        loop {
            let limit = best.as_ref().map_or(usize::MAX, |(_, s)| s - 1);
            if let Some((_, swaps)) = route_core(&self.gates, &perm, topo, limit, |_: Step| {}) {
                best = Some((perm.clone(), swaps));
                if swaps == 0 {
                    break;
                }
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.expect("a connected subset always routes")
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Estimated success probability of running `circuit` on `subset`:
/// `(1−e1)^N1q · (1−e2)^(N2q+3S) · (1−ero)^Nm`, counts from the rebased
/// circuit and `S` the fewest SWAPs the router needs on that subset.
pub fn score_partition(device: &DeviceModel, subset: &[usize], circuit: &QuantumCircuit) -> Result<f64, CompileError> {
    let topo = Topology::of(device);
    check_embedding(circuit.n_qubits, subset, device, &topo)?;
    let prepared = Prepared::new(circuit, device)?;
    let (_, swaps) = prepared.best_embedding(subset, &topo);
    Ok(prepared.score(device, swaps))
}

/// Places programs one at a time, most two-qubit gates first (ties keep
/// input order), each on the highest-scoring connected subset of the
/// still-free qubits; ties go to the lexicographically smallest subset.
pub fn allocate_partitions(device: &DeviceModel, circuits: &[QuantumCircuit]) -> Result<Allocation, CompileError> {
    let needed: usize = circuits.iter().map(|c| c.n_qubits).sum();
    if needed > device.n_qubits {
        return Err(CompileError::InsufficientQubits {
            needed,
            available: device.n_qubits,
        });
    }
    let topo = Topology::of(device);
    let prepared = circuits
        .iter()
        .map(|c| Prepared::new(c, device))
        .collect::<Result<Vec<_>, _>>()?;

    let mut order: Vec<usize> = (0..circuits.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(two_qubit_count(&prepared[i])));

    let mut free = vec![true; device.n_qubits];
    let mut placements: Vec<Option<ProgramPlacement>> = vec![None; circuits.len()];
    for i in order {
        let p = &prepared[i];
        let mut best: Option<(f64, Vec<usize>, usize)> = None;
        for subset in connected_subsets(&topo.neighbors, &free, p.n_qubits) {
            let (embedding, swaps) = p.best_embedding(&subset, &topo);
            let score = p.score(device, swaps);
            if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                best = Some((score, embedding, swaps));
            }
        }
        let (score, embedding, swaps) = best.ok_or_else(|| CompileError::NoConnectedSubset {
            program: circuits[i].name.clone(),
            size: p.n_qubits,
        })?;
        for &q in &embedding {
            free[q] = false;
        }
        placements[i] = Some(ProgramPlacement {
            circuit: circuits[i].name.clone(),
            embedding,
            score,
            swaps,
        });
    }
    Ok(Allocation {
        device: device.name.clone(),
        programs: placements.into_iter().map(Option::unwrap).collect(),
    })
}

fn two_qubit_count(p: &Prepared) -> usize {
    p.gates.iter().filter(|g| g.is_two_qubit()).count()
}
