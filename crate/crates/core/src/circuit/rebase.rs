//! Rewriting circuits into a device's native gate set.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{Gate, GateKind, QuantumCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// `{Rz, SX, X, CX}`
    Superconducting,
    /// `{U1q, Rz, ZZ}`
    TrappedIon,
}

impl Basis {
    pub fn contains(&self, kind: &GateKind) -> bool {
        match self {
            Basis::Superconducting => matches!(kind, GateKind::Rz(_) | GateKind::SX | GateKind::X | GateKind::CX),
            Basis::TrappedIon => matches!(kind, GateKind::U1q { .. } | GateKind::Rz(_) | GateKind::ZZ(_)),
        }
    }
}

/// The standard Toffoli network: six CX, with T/T† realised as `Rz(±π/4)`.
pub fn ccx_network(a: usize, b: usize, t: usize) -> Vec<Gate> {
    vec![
        Gate::h(t),
        Gate::cx(b, t),
        Gate::rz(-FRAC_PI_4, t),
        Gate::cx(a, t),
        Gate::rz(FRAC_PI_4, t),
        Gate::cx(b, t),
        Gate::rz(-FRAC_PI_4, t),
        Gate::cx(a, t),
        Gate::rz(FRAC_PI_4, b),
        Gate::rz(FRAC_PI_4, t),
        Gate::h(t),
        Gate::cx(a, b),
        Gate::rz(FRAC_PI_4, a),
        Gate::rz(-FRAC_PI_4, b),
        Gate::cx(a, b),
    ]
}

/// Replaces every CCX with [`ccx_network`]; other gates are untouched.
pub fn expand_ccx(circuit: &QuantumCircuit) -> QuantumCircuit {
    let mut out = QuantumCircuit::new(circuit.name.clone(), circuit.n_qubits, circuit.n_cbits);
    for g in &circuit.gates {
        if g.kind == GateKind::CCX {
            out.gates.extend(ccx_network(g.qubits[0], g.qubits[1], g.qubits[2]));
        } else {
            out.gates.push(g.clone());
        }
    }
    out
}

fn superconducting(g: &Gate, out: &mut Vec<Gate>) {
    let q = g.qubits.first().copied().unwrap_or(0);
    match g.kind {
        GateKind::H => out.extend([Gate::rz(FRAC_PI_2, q), Gate::sx(q), Gate::rz(FRAC_PI_2, q)]),
        // H·Rz(θ)·H with adjacent Rz merged.
        GateKind::Rx(t) => out.extend([
            Gate::rz(FRAC_PI_2, q),
            Gate::sx(q),
            Gate::rz(t + PI, q),
            Gate::sx(q),
            Gate::rz(FRAC_PI_2, q),
        ]),
        // Rz(φ)·Rx(θ)·Rz(-φ)
        GateKind::U1q { theta, phi } => {
            out.push(Gate::rz(-phi, q));
            superconducting(&Gate::rx(theta, q), out);
            out.push(Gate::rz(phi, q));
        }
        GateKind::ZZ(t) => {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            out.extend([Gate::cx(a, b), Gate::rz(t, b), Gate::cx(a, b)]);
        }
        GateKind::Swap => {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            out.extend([Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)]);
        }
        GateKind::CCX => {
            for h in ccx_network(g.qubits[0], g.qubits[1], g.qubits[2]) {
                superconducting(&h, out);
            }
        }
        _ => out.push(g.clone()),
    }
}

fn trapped_ion(g: &Gate, out: &mut Vec<Gate>) {
    let q = g.qubits.first().copied().unwrap_or(0);
    match g.kind {
        GateKind::X => out.push(Gate::u1q(PI, 0.0, q)),
        GateKind::SX => out.push(Gate::u1q(FRAC_PI_2, 0.0, q)),
        GateKind::Rx(t) => out.push(Gate::u1q(t, 0.0, q)),
        // H = Ry(π/2)·Z
        GateKind::H => out.extend([Gate::rz(PI, q), Gate::u1q(FRAC_PI_2, FRAC_PI_2, q)]),
        // CX = Ry_t(π/2) · CZ · Ry_t(-π/2), CZ = ZZ(-π/2) with local Rz(π/2).
        GateKind::CX => {
            let (c, t) = (g.qubits[0], g.qubits[1]);
            out.extend([
                Gate::u1q(-FRAC_PI_2, FRAC_PI_2, t),
                Gate::zz(-FRAC_PI_2, c, t),
                Gate::rz(FRAC_PI_2, c),
                Gate::rz(FRAC_PI_2, t),
                Gate::u1q(FRAC_PI_2, FRAC_PI_2, t),
            ]);
        }
        GateKind::Swap => {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            for h in [Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)] {
                trapped_ion(&h, out);
            }
        }
        GateKind::CCX => {
            for h in ccx_network(g.qubits[0], g.qubits[1], g.qubits[2]) {
                trapped_ion(&h, out);
            }
        }
        _ => out.push(g.clone()),
    }
}

/// Rewrites `circuit` so that every unitary gate belongs to `basis`.
/// Measurements and barriers pass through; gates already native are kept
/// verbatim, so rebasing is idempotent.
pub fn rebase_to_basis(circuit: &QuantumCircuit, basis: Basis) -> QuantumCircuit {
    let mut out = QuantumCircuit::new(circuit.name.clone(), circuit.n_qubits, circuit.n_cbits);
    for g in &circuit.gates {
        if basis.contains(&g.kind) || matches!(g.kind, GateKind::Measure { .. } | GateKind::Barrier) {
            out.gates.push(g.clone());
            continue;
        }
        match basis {
            Basis::Superconducting => superconducting(g, &mut out.gates),
            Basis::TrappedIon => trapped_ion(g, &mut out.gates),
        }
    }
    out
}
