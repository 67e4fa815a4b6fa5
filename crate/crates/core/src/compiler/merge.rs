//! Combining routed programs into one device-wide circuit.

use std::ops::Range;

use super::CompileError;
use crate::circuit::{Gate, GateKind, QuantumCircuit};
use crate::device::DeviceModel;

/// Concatenates programs acting on disjoint physical qubits. Program `k`'s
/// classical bits are shifted past those of programs `0..k`.
pub fn merge_programs(programs: &[QuantumCircuit], device: &DeviceModel) -> Result<QuantumCircuit, CompileError> {
    let mut owner: Vec<Option<usize>> = vec![None; device.n_qubits];
    for (k, p) in programs.iter().enumerate() {
        p.validate()?;
        for g in &p.gates {
            for &q in &g.qubits {
                if q >= device.n_qubits {
                    return Err(CompileError::InvalidEmbedding(format!(
                        "program {k} uses qubit {q} outside the {}-qubit device",
                        device.n_qubits
                    )));
                }
                match owner[q] {
                    Some(j) if j != k => {
                        return Err(CompileError::Overlap {
                            qubit: q,
                            programs: (j, k),
                        })
                    }
                    _ => owner[q] = Some(k),
                }
            }
        }
    }

    let name = programs.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join("+");
    let n_cbits = programs.iter().map(|p| p.n_cbits).sum();
    let mut merged = QuantumCircuit::new(name, device.n_qubits, n_cbits);
    let mut offset = 0;
    for p in programs {
        for g in &p.gates {
            merged.gates.push(match g.kind {
                GateKind::Measure { cbit } => Gate::measure(g.qubits[0], cbit + offset),
                _ => g.clone(),
            });
        }
        offset += p.n_cbits;
    }
    Ok(merged)
}

/// Classical-bit range each program occupies in the merged circuit.
pub fn cbit_ranges(programs: &[QuantumCircuit]) -> Vec<Range<usize>> {
    let mut start = 0;
    programs
        .iter()
        .map(|p| {
            let r = start..start + p.n_cbits;
            start = r.end;
            r
        })
        .collect()
}
