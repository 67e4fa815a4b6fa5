//! Partition allocation, routing, merging and scheduling.

mod allocate;
mod merge;
mod route;
mod schedule;
mod subsets;

pub use allocate::{allocate_partitions, score_partition, Allocation, ProgramPlacement};
pub use merge::{cbit_ranges, merge_programs};
pub use route::{route_to_partition, RoutedCircuit};
pub use schedule::{schedule_circuit, GateTiming, Schedule};
pub use subsets::{connected_subsets, is_connected};

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{rebase_to_basis, CircuitError, QuantumCircuit};
use crate::device::DeviceModel;

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error("programs need {needed} qubits but the device has {available}")]
    InsufficientQubits { needed: usize, available: usize },
    #[error("no connected {size}-qubit subset is free for program '{program}'")]
    NoConnectedSubset { program: String, size: usize },
    #[error("physical qubits {0:?} do not induce a connected subgraph")]
    DisconnectedPartition(Vec<usize>),
    #[error("expected {expected} physical qubits, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("programs {} and {} both use qubit {qubit}", programs.0, programs.1)]
    Overlap { qubit: usize, programs: (usize, usize) },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Everything produced by compiling a batch of programs for simultaneous
/// execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledBatch {
    pub allocation: Allocation,
    pub routed: Vec<RoutedCircuit>,
    pub merged: QuantumCircuit,
    pub cbit_ranges: Vec<Range<usize>>,
    pub schedule: Schedule,
}

/// Rebase, allocate, route, merge and schedule in one step.
pub fn compile_batch(device: &DeviceModel, programs: &[QuantumCircuit]) -> Result<CompiledBatch, CompileError> {
    let programs: Vec<QuantumCircuit> = programs.iter().map(|p| rebase_to_basis(p, device.basis)).collect();
    let allocation = allocate_partitions(device, &programs)?;
    let routed = programs
        .iter()
        .zip(&allocation.programs)
        .map(|(p, place)| route_to_partition(p, &place.embedding, device))
        .collect::<Result<Vec<_>, _>>()?;
    let physical: Vec<QuantumCircuit> = routed.iter().map(|r| r.circuit.clone()).collect();
    let merged = merge_programs(&physical, device)?;
    let schedule = schedule_circuit(&merged, device);
    Ok(CompiledBatch {
        allocation,
        routed,
        cbit_ranges: cbit_ranges(&physical),
        merged,
        schedule,
    })
}
