//! Dense gate matrices and whole-circuit unitaries for small circuits.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use super::{CircuitError, GateKind, QuantumCircuit};

pub const MAX_UNITARY_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major square matrix of dimension `2^k` for a `k`-qubit gate. The
/// gate's first qubit is the most significant bit of the local index.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl GateMatrix {
    fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    /// `Some(diagonal)` when every off-diagonal entry is exactly zero.
    pub fn diagonal(&self) -> Option<Vec<Complex64>> {
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c && self.at(r, c) != ZERO {
                    return None;
                }
            }
        }
        Some((0..self.dim).map(|i| self.at(i, i)).collect())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Matrix of a unitary gate; `None` for `Measure` and `Barrier`.
pub fn gate_matrix(kind: &GateKind) -> Option<GateMatrix> {
    let m = match *kind {
        GateKind::X => GateMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        GateKind::SX => GateMatrix::from_rows([[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]),
        GateKind::H => GateMatrix::from_rows([
            [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
        ]),
        GateKind::Rz(t) => GateMatrix::from_rows([
            [Complex64::from_polar(1.0, -t / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, t / 2.0)],
        ]),
        GateKind::Rx(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            GateMatrix::from_rows([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
        }
        GateKind::U1q { theta, phi } => {
            let (s, co) = (theta / 2.0).sin_cos();
            GateMatrix::from_rows([
                [c(co, 0.0), -I * Complex64::from_polar(s, -phi)],
                [-I * Complex64::from_polar(s, phi), c(co, 0.0)],
            ])
        }
        GateKind::CX => GateMatrix::from_rows([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
        ]),
        GateKind::ZZ(t) => {
            let a = Complex64::from_polar(1.0, -t / 2.0);
            let b = Complex64::from_polar(1.0, t / 2.0);
            GateMatrix::from_rows([
                [a, ZERO, ZERO, ZERO],
                [ZERO, b, ZERO, ZERO],
                [ZERO, ZERO, b, ZERO],
                [ZERO, ZERO, ZERO, a],
            ])
        }
        GateKind::Swap => GateMatrix::from_rows([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ]),
        GateKind::CCX => {
            let mut data = vec![ZERO; 64];
            for r in 0..8usize {
                let col = if r >= 6 { r ^ 1 } else { r };
                data[r * 8 + col] = ONE;
            }
            GateMatrix { dim: 8, data }
        }
        GateKind::Measure { .. } | GateKind::Barrier => return None,
    };
    Some(m)
}

/// Applies `matrix` to `qubits` of a little-endian state vector (qubit `q`
/// is bit `q` of the amplitude index).
pub fn apply_matrix(state: &mut [Complex64], matrix: &GateMatrix, qubits: &[usize]) {
    let k = qubits.len();
    debug_assert_eq!(matrix.dim, 1 << k);
    if let Some(diag) = matrix.diagonal() {
        for (idx, amp) in state.iter_mut().enumerate() {
            let mut local = 0;
            for (j, &q) in qubits.iter().enumerate() {
                local |= ((idx >> q) & 1) << (k - 1 - j);
            }
            *amp *= diag[local];
        }
        return;
    }
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..matrix.dim)
        .map(|local| {
            (0..k)
                .filter(|j| (local >> (k - 1 - j)) & 1 == 1)
                .map(|j| 1usize << qubits[j])
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; matrix.dim];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (b, &off) in buf.iter_mut().zip(&offsets) {
            *b = state[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &matrix.data[r * matrix.dim..(r + 1) * matrix.dim];
            state[base | off] = row.iter().zip(&buf).map(|(m, v)| m * v).sum();
        }
    }
}

/// Column-major dense unitary of a measurement-free circuit.
#[derive(Debug, Clone)]
pub struct Unitary {
    pub n_qubits: usize,
    /// `columns[j]` is the image of basis state `j`.
    pub columns: Vec<Vec<Complex64>>,
}

impl Unitary {
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.columns[col][row]
    }

    /// `tr(self† · other)`.
    pub fn overlap(&self, other: &Unitary) -> Complex64 {
        self.columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>())
            .sum()
    }
}

pub fn circuit_unitary(circuit: &QuantumCircuit) -> Result<Unitary, CircuitError> {
    if circuit.has_measurements() {
        return Err(CircuitError::HasMeasurements);
    }
    if circuit.n_qubits > MAX_UNITARY_QUBITS {
        return Err(CircuitError::TooManyQubits {
            n: circuit.n_qubits,
            cap: MAX_UNITARY_QUBITS,
        });
    }
    circuit.validate()?;
    let dim = 1usize << circuit.n_qubits;
    let matrices: Vec<_> = circuit
        .gates
        .iter()
        .filter_map(|g| gate_matrix(&g.kind).map(|m| (m, g.qubits.as_slice())))
        .collect();
    let columns = (0..dim)
        .map(|j| {
            let mut col = vec![ZERO; dim];
            col[j] = ONE;
            for (m, qs) in &matrices {
                apply_matrix(&mut col, m, qs);
            }
            col
        })
        .collect();
    Ok(Unitary {
        n_qubits: circuit.n_qubits,
        columns,
    })
}

/// True iff the two measurement-free circuits implement the same unitary up
/// to global phase: `|tr(Ua† Ub)| / 2^n > 1 - 1e-9`.
pub fn verify_equivalence(a: &QuantumCircuit, b: &QuantumCircuit) -> Result<bool, CircuitError> {
    if a.n_qubits != b.n_qubits {
        return Err(CircuitError::DimensionMismatch(a.n_qubits, b.n_qubits));
    }
    let ua = circuit_unitary(a)?;
    let ub = circuit_unitary(b)?;
    let dim = (1usize << a.n_qubits) as f64;
    Ok(ua.overlap(&ub).norm() / dim > 1.0 - 1e-9)
}
