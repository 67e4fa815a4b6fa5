//! Circuit data model.
//!
//! A [`QuantumCircuit`] is an ordered list of [`Gate`]s over `n_qubits`
//! logical (or, after routing, physical) qubits plus `n_cbits` classical
//! bits written by `Measure` gates.
//!
//! Bit-order convention used everywhere in this crate: an outcome bitstring
//! prints classical bit 0 as its leftmost character.

mod library;
mod qasm;
mod rebase;
mod stats;
mod unitary;

pub use library::{bundled_benchmarks, generate_bv, load_benchmark, Benchmark, BenchmarkManifest, BenchmarkRecord};
pub use qasm::{emit_qasm, parse_qasm, QasmError};
pub use rebase::{expand_ccx, rebase_to_basis, Basis};
pub use stats::{circuit_stats, CircuitStats};
pub use unitary::{
    apply_matrix, circuit_unitary, gate_matrix, verify_equivalence, GateMatrix, Unitary, MAX_UNITARY_QUBITS,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("gate {index} ({name}): expected {expected} qubit(s), got {got}")]
    Arity {
        index: usize,
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("gate {index} ({name}): qubit {qubit} out of range for {n_qubits}-qubit circuit")]
    QubitOutOfRange {
        index: usize,
        name: &'static str,
        qubit: usize,
        n_qubits: usize,
    },
    #[error("gate {index} ({name}): repeated qubit {qubit}")]
    RepeatedQubit {
        index: usize,
        name: &'static str,
        qubit: usize,
    },
    #[error("gate {index}: classical bit {cbit} out of range for {n_cbits} bit(s)")]
    CbitOutOfRange { index: usize, cbit: usize, n_cbits: usize },
    #[error("gate {index}: classical bit {cbit} is measured more than once")]
    DuplicateMeasure { index: usize, cbit: usize },
    #[error("gate {index} ({name}): non-finite rotation angle")]
    NonFiniteAngle { index: usize, name: &'static str },
    #[error("gate {index} acts on qubit {qubit} after it was measured")]
    GateAfterMeasure { index: usize, qubit: usize },
    #[error("circuit contains measurements")]
    HasMeasurements,
    #[error("qubit-count mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{n} qubits exceeds the dense-unitary cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error("hidden string must be a non-empty string of '0'/'1'")]
    InvalidHiddenString,
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("malformed benchmark manifest: {0}")]
    Manifest(String),
}

/// Native and compound operations understood by the toolchain.
///
/// Angles are radians. `ZZ(θ)` is `exp(-i θ/2 Z⊗Z)`; `U1q(θ, φ)` is
/// `exp(-i θ/2 (cos φ X + sin φ Y))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    X,
    SX,
    H,
    Rz(f64),
    Rx(f64),
    U1q { theta: f64, phi: f64 },
    CX,
    ZZ(f64),
    CCX,
    Swap,
    Measure { cbit: usize },
    Barrier,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::SX => "sx",
            GateKind::H => "h",
            GateKind::Rz(_) => "rz",
            GateKind::Rx(_) => "rx",
            GateKind::U1q { .. } => "u1q",
            GateKind::CX => "cx",
            GateKind::ZZ(_) => "rzz",
            GateKind::CCX => "ccx",
            GateKind::Swap => "swap",
            GateKind::Measure { .. } => "measure",
            GateKind::Barrier => "barrier",
        }
    }

    /// Required number of qubits, or `None` for variadic (barrier).
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::X
            | GateKind::SX
            | GateKind::H
            | GateKind::Rz(_)
            | GateKind::Rx(_)
            | GateKind::U1q { .. }
            | GateKind::Measure { .. } => Some(1),
            GateKind::CX | GateKind::ZZ(_) | GateKind::Swap => Some(2),
            GateKind::CCX => Some(3),
            GateKind::Barrier => None,
        }
    }

    fn angles(&self) -> [f64; 2] {
        match *self {
            GateKind::Rz(t) | GateKind::Rx(t) | GateKind::ZZ(t) => [t, 0.0],
            GateKind::U1q { theta, phi } => [theta, phi],
            _ => [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: impl Into<Vec<usize>>) -> Self {
        Self {
            kind,
            qubits: qubits.into(),
        }
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, [q])
    }
    pub fn sx(q: usize) -> Self {
        Self::new(GateKind::SX, [q])
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, [q])
    }
    pub fn rz(theta: f64, q: usize) -> Self {
        Self::new(GateKind::Rz(theta), [q])
    }
    pub fn rx(theta: f64, q: usize) -> Self {
        Self::new(GateKind::Rx(theta), [q])
    }
    pub fn u1q(theta: f64, phi: f64, q: usize) -> Self {
        Self::new(GateKind::U1q { theta, phi }, [q])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::CX, [control, target])
    }
    pub fn zz(theta: f64, a: usize, b: usize) -> Self {
        Self::new(GateKind::ZZ(theta), [a, b])
    }
    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        Self::new(GateKind::CCX, [c0, c1, target])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, [a, b])
    }
    pub fn measure(q: usize, cbit: usize) -> Self {
        Self::new(GateKind::Measure { cbit }, [q])
    }
    pub fn barrier(qubits: impl Into<Vec<usize>>) -> Self {
        Self::new(GateKind::Barrier, qubits)
    }

    pub fn is_measure(&self) -> bool {
        matches!(self.kind, GateKind::Measure { .. })
    }

    /// Unitary gates acting on exactly one qubit.
    pub fn is_single_qubit(&self) -> bool {
        self.kind.arity() == Some(1) && !self.is_measure()
    }

    /// Unitary gates acting on two or more qubits.
    pub fn is_multi_qubit(&self) -> bool {
        matches!(self.kind.arity(), Some(n) if n >= 2)
    }

    /// Two-qubit entanglers (CX, ZZ, SWAP).
    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == Some(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumCircuit {
    pub name: String,
    pub n_qubits: usize,
    pub n_cbits: usize,
    pub gates: Vec<Gate>,
}

impl QuantumCircuit {
    pub fn new(name: impl Into<String>, n_qubits: usize, n_cbits: usize) -> Self {
        Self {
            name: name.into(),
            n_qubits,
            n_cbits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    /// Measure qubit `i` into classical bit `i` for every qubit.
    pub fn measure_all(&mut self) -> &mut Self {
        for q in 0..self.n_qubits {
            self.gates.push(Gate::measure(q, q));
        }
        self.n_cbits = self.n_cbits.max(self.n_qubits);
        self
    }

    pub fn has_measurements(&self) -> bool {
        self.gates.iter().any(Gate::is_measure)
    }

    /// Copy of the circuit with every `Measure` removed.
    pub fn without_measurements(&self) -> QuantumCircuit {
        QuantumCircuit {
            name: self.name.clone(),
            n_qubits: self.n_qubits,
            n_cbits: self.n_cbits,
            gates: self.gates.iter().filter(|g| !g.is_measure()).cloned().collect(),
        }
    }

    /// `(qubit, cbit)` pairs in gate order.
    pub fn measurements(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .filter_map(|g| match g.kind {
                GateKind::Measure { cbit } => Some((g.qubits[0], cbit)),
                _ => None,
            })
            .collect()
    }

    /// Qubits touched by at least one gate, ascending.
    pub fn active_qubits(&self) -> Vec<usize> {
        let mut used = vec![false; self.n_qubits];
        for g in &self.gates {
            if g.kind == GateKind::Barrier {
                continue;
            }
            for &q in &g.qubits {
                if q < used.len() {
                    used[q] = true;
                }
            }
        }
        (0..self.n_qubits).filter(|&q| used[q]).collect()
    }

    /// Checks every structural invariant of the circuit.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut measured_cbits = vec![false; self.n_cbits];
        for (index, g) in self.gates.iter().enumerate() {
            let name = g.kind.name();
            match g.kind.arity() {
                Some(expected) if expected != g.qubits.len() => {
                    return Err(CircuitError::Arity {
                        index,
                        name,
                        expected,
                        got: g.qubits.len(),
                    })
                }
                None if g.qubits.is_empty() => {
                    return Err(CircuitError::Arity {
                        index,
                        name,
                        expected: 1,
                        got: 0,
                    })
                }
                _ => {}
            }
            for (i, &q) in g.qubits.iter().enumerate() {
                if q >= self.n_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        index,
                        name,
                        qubit: q,
                        n_qubits: self.n_qubits,
                    });
                }
                if g.qubits[..i].contains(&q) {
                    return Err(CircuitError::RepeatedQubit { index, name, qubit: q });
                }
            }
            if g.kind.angles().iter().any(|a| !a.is_finite()) {
                return Err(CircuitError::NonFiniteAngle { index, name });
            }
            if let GateKind::Measure { cbit } = g.kind {
                if cbit >= self.n_cbits {
                    return Err(CircuitError::CbitOutOfRange {
                        index,
                        cbit,
                        n_cbits: self.n_cbits,
                    });
                }
                if measured_cbits[cbit] {
                    return Err(CircuitError::DuplicateMeasure { index, cbit });
                }
                measured_cbits[cbit] = true;
            }
        }
        Ok(())
    }

    /// Rejects unitary gates applied to an already-measured qubit. The
    /// simulator treats every measurement as terminal.
    pub fn check_terminal_measurements(&self) -> Result<(), CircuitError> {
        let mut measured = vec![false; self.n_qubits];
        for (index, g) in self.gates.iter().enumerate() {
            match g.kind {
                GateKind::Measure { .. } => measured[g.qubits[0]] = true,
                GateKind::Barrier => {}
                _ => {
                    if let Some(&q) = g.qubits.iter().find(|&&q| measured[q]) {
                        return Err(CircuitError::GateAfterMeasure { index, qubit: q });
                    }
                }
            }
        }
        Ok(())
    }
}
