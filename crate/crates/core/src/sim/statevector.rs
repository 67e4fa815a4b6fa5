//! Dense state-vector kernels over a compacted qubit index space.

use num_complex::Complex64;

use crate::circuit::{gate_matrix, Gate, GateKind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A gate lowered onto compact qubit indices with its matrix precomputed.
#[derive(Debug, Clone)]
pub(crate) enum Op {
    X(usize),
    Diag1(usize, [Complex64; 2]),
    Dense1(usize, [Complex64; 4]),
    Cx(usize, usize),
    Ccx(usize, usize, usize),
    Swap(usize, usize),
    Diag2(usize, usize, [Complex64; 4]),
    Dense2(usize, usize, [Complex64; 16]),
    /// Measurement and barrier placeholders keep op and gate indices aligned.
    Nop,
}

impl Op {
    pub(crate) fn lower(gate: &Gate, map: &[usize]) -> Op {
        let q = |i: usize| map[gate.qubits[i]];
        match gate.kind {
            GateKind::Measure { .. } | GateKind::Barrier => Op::Nop,
            GateKind::X => Op::X(q(0)),
            GateKind::CX => Op::Cx(q(0), q(1)),
            GateKind::CCX => Op::Ccx(q(0), q(1), q(2)),
            GateKind::Swap => Op::Swap(q(0), q(1)),
            kind => {
                let m = gate_matrix(&kind).expect("unitary gate");
                match (m.dim, m.diagonal()) {
                    (2, Some(d)) => Op::Diag1(q(0), [d[0], d[1]]),
                    (2, None) => Op::Dense1(q(0), m.data.try_into().unwrap()),
                    (4, Some(d)) => Op::Diag2(q(0), q(1), d.try_into().unwrap()),
                    (4, None) => Op::Dense2(q(0), q(1), m.data.try_into().unwrap()),
                    _ => unreachable!("no other gate dimensions"),
                }
            }
        }
    }

    /// Compact qubits the op acts on.
    pub(crate) fn qubits(&self) -> Vec<usize> {
        match *self {
            Op::X(a) | Op::Diag1(a, _) | Op::Dense1(a, _) => vec![a],
            Op::Cx(a, b) | Op::Swap(a, b) | Op::Diag2(a, b, _) | Op::Dense2(a, b, _) => vec![a, b],
            Op::Ccx(a, b, c) => vec![a, b, c],
            Op::Nop => vec![],
        }
    }
}

/// Little-endian state vector: qubit `q` is bit `q` of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies a gate whose qubit indices address this state directly.
    pub fn apply(&mut self, gate: &Gate) {
        let identity: Vec<usize> = (0..self.n_qubits).collect();
        self.apply_op(&Op::lower(gate, &identity));
    }

    /// Applies the Pauli word `code` to `qubits`: base-4 digits, least
    /// significant digit on the last qubit, `1 = X, 2 = Y, 3 = Z`.
    pub fn apply_pauli(&mut self, qubits: &[usize], mut code: usize) {
        for &q in qubits.iter().rev() {
            match code % 4 {
                1 => self.pauli_x(q),
                2 => self.pauli_y(q),
                3 => self.pauli_z(q),
                _ => {}
            }
            code /= 4;
        }
    }

    fn pauli_x(&mut self, q: usize) {
        let m = 1 << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    fn pauli_y(&mut self, q: usize) {
        let m = 1 << q;
        let i_unit = Complex64::new(0.0, 1.0);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = -i_unit * b;
                self.amps[i | m] = i_unit * a;
            }
        }
    }

    fn pauli_z(&mut self, q: usize) {
        let m = 1 << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
    }

    pub(crate) fn apply_op(&mut self, op: &Op) {
        let s = &mut self.amps;
        match *op {
            Op::Nop => {}
            Op::X(q) => {
                let m = 1 << q;
                for i in 0..s.len() {
                    if i & m == 0 {
                        s.swap(i, i | m);
                    }
                }
            }
            Op::Diag1(q, d) => {
                let m = 1 << q;
                for (i, a) in s.iter_mut().enumerate() {
                    *a *= d[(i & m != 0) as usize];
                }
            }
            Op::Dense1(q, u) => {
                let m = 1 << q;
                for i in 0..s.len() {
                    if i & m == 0 {
                        let (a, b) = (s[i], s[i | m]);
                        s[i] = u[0] * a + u[1] * b;
                        s[i | m] = u[2] * a + u[3] * b;
                    }
                }
            }
            Op::Cx(c, t) => {
                let (mc, mt) = (1 << c, 1 << t);
                for i in 0..s.len() {
                    if i & mc != 0 && i & mt == 0 {
                        s.swap(i, i | mt);
                    }
                }
            }
            Op::Ccx(c0, c1, t) => {
                let (m0, m1, mt) = (1 << c0, 1 << c1, 1 << t);
                for i in 0..s.len() {
                    if i & m0 != 0 && i & m1 != 0 && i & mt == 0 {
                        s.swap(i, i | mt);
                    }
                }
            }
            Op::Swap(a, b) => {
                let (ma, mb) = (1 << a, 1 << b);
                for i in 0..s.len() {
                    if i & ma != 0 && i & mb == 0 {
                        s.swap(i, (i & !ma) | mb);
                    }
                }
            }
            Op::Diag2(a, b, d) => {
                let (ma, mb) = (1 << a, 1 << b);
                for (i, amp) in s.iter_mut().enumerate() {
                    let local = (((i & ma != 0) as usize) << 1) | (i & mb != 0) as usize;
                    *amp *= d[local];
                }
            }
            Op::Dense2(a, b, u) => {
                let (ma, mb) = (1 << a, 1 << b);
                for i in 0..s.len() {
                    if i & (ma | mb) == 0 {
                        let idx = [i, i | mb, i | ma, i | ma | mb];
                        let v = idx.map(|k| s[k]);
                        for (r, &k) in idx.iter().enumerate() {
                            s[k] = u[4 * r] * v[0] + u[4 * r + 1] * v[1] + u[4 * r + 2] * v[2] + u[4 * r + 3] * v[3];
                        }
                    }
                }
            }
        }
    }
}
