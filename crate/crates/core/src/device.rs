//! Device descriptions, derived noise models and the submission cost model.
//!
//! Error rates are stored as fractions (`0.045`, not `4.5`) and are used
//! directly as Pauli-injection probabilities by the simulator.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{rebase_to_basis, Basis, QuantumCircuit};

/// Crosstalk amplification applied to superconducting two-qubit errors
/// unless a campaign overrides it. Matches `configs/ibmq_mumbai_like.toml`.
pub const DEFAULT_CROSSTALK_LAMBDA: f64 = 4.0;

#[derive(Debug, Error, PartialEq)]
pub enum DeviceError {
    #[error("unknown builtin device `{0}` (expected ibmq_mumbai_like or h1_2_like)")]
    UnknownBuiltin(String),
    #[error("field `{field}`: {msg}")]
    Invalid { field: String, msg: String },
    #[error("device config: {0}")]
    Parse(String),
    #[error("shots must be at least 1")]
    ZeroShots,
}

fn invalid(field: impl Into<String>, msg: impl Into<String>) -> DeviceError {
    DeviceError::Invalid {
        field: field.into(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Technology {
    Superconducting,
    TrappedIon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinDevice {
    IbmqMumbaiLike,
    H12Like,
}

impl BuiltinDevice {
    pub const ALL: [BuiltinDevice; 2] = [BuiltinDevice::IbmqMumbaiLike, BuiltinDevice::H12Like];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinDevice::IbmqMumbaiLike => "ibmq_mumbai_like",
            BuiltinDevice::H12Like => "h1_2_like",
        }
    }
}

impl fmt::Display for BuiltinDevice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinDevice {
    type Err = DeviceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| DeviceError::UnknownBuiltin(s.to_string()))
    }
}

/// Per-submission pricing:
/// `fixed_per_submission + shots · (w1q·N1q + w2q·N2q + wmeas·Nm) / divisor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParams {
    pub fixed_per_submission: f64,
    pub w1q: f64,
    pub w2q: f64,
    pub wmeas: f64,
    pub divisor: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            fixed_per_submission: 5.0,
            w1q: 1.0,
            w2q: 10.0,
            wmeas: 5.0,
            divisor: 5000.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), DeviceError> {
        for (field, v) in [
            ("cost.fixed_per_submission", self.fixed_per_submission),
            ("cost.w1q", self.w1q),
            ("cost.w2q", self.w2q),
            ("cost.wmeas", self.wmeas),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(field, format!("must be a non-negative number, got {v}")));
            }
        }
        if !(self.divisor.is_finite() && self.divisor > 0.0) {
            return Err(invalid(
                "cost.divisor",
                format!("must be positive, got {}", self.divisor),
            ));
        }
        Ok(())
    }
}

/// Abstract slice durations used by the scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceWeights {
    pub one_qubit: usize,
    pub two_qubit: usize,
}

impl Default for SliceWeights {
    fn default() -> Self {
        Self {
            one_qubit: 1,
            two_qubit: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceModel {
    pub name: String,
    pub technology: Technology,
    pub n_qubits: usize,
    pub basis: Basis,
    pub err_1q: f64,
    pub err_2q: f64,
    pub err_ro: f64,
    /// Maximum simultaneous two-qubit gates; `None` means only qubit
    /// disjointness limits parallelism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone_capacity: Option<usize>,
    /// Whether simultaneous neighbouring two-qubit gates amplify errors.
    pub crosstalk: bool,
    /// Undirected coupling edges, each stored as `[low, high]`.
    pub coupling: Vec<[usize; 2]>,
    #[serde(default)]
    pub cost: CostParams,
    #[serde(default)]
    pub slice_weights: SliceWeights,
}

/// Coupling map of a 27-qubit heavy-hexagon (Falcon-style) lattice.
#[rustfmt::skip]
const HEAVY_HEX_27: [[usize; 2]; 28] = [
    [0, 1], [1, 2], [1, 4], [2, 3], [3, 5], [4, 7], [5, 8], [6, 7], [7, 10], [8, 9],
    [8, 11], [10, 12], [11, 14], [12, 13], [12, 15], [13, 14], [14, 16], [15, 18], [16, 19], [17, 18],
    [18, 21], [19, 20], [19, 22], [21, 23], [22, 25], [23, 24], [24, 25], [25, 26],
];

fn complete_graph(n: usize) -> Vec<[usize; 2]> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| [a, b])).collect()
}

pub fn builtin_device(which: BuiltinDevice) -> DeviceModel {
    match which {
        BuiltinDevice::IbmqMumbaiLike => DeviceModel {
            name: which.name().into(),
            technology: Technology::Superconducting,
            n_qubits: 27,
            basis: Basis::Superconducting,
            err_1q: 0.0002,
            err_2q: 0.045,
            err_ro: 0.029,
            zone_capacity: None,
            crosstalk: true,
            coupling: HEAVY_HEX_27.to_vec(),
            cost: CostParams::default(),
            slice_weights: SliceWeights::default(),
        },
        BuiltinDevice::H12Like => DeviceModel {
            name: which.name().into(),
            technology: Technology::TrappedIon,
            n_qubits: 12,
            basis: Basis::TrappedIon,
            err_1q: 0.0001,
            err_2q: 0.0035,
            err_ro: 0.004,
            zone_capacity: Some(3),
            crosstalk: false,
            coupling: complete_graph(12),
            cost: CostParams::default(),
            slice_weights: SliceWeights::default(),
        },
    }
}

/// Parses and validates a TOML device document.
pub fn load_device(text: &str) -> Result<DeviceModel, DeviceError> {
    let device: DeviceModel = toml::from_str(text).map_err(|e| DeviceError::Parse(e.to_string()))?;
    device.validate()?;
    Ok(device)
}

impl DeviceModel {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("device model serializes")
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        for (field, p) in [
            ("err_1q", self.err_1q),
            ("err_2q", self.err_2q),
            ("err_ro", self.err_ro),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(field, format!("probability {p} outside [0, 1]")));
            }
        }
        if self.zone_capacity == Some(0) {
            return Err(invalid("zone_capacity", "must be at least 1"));
        }
        if self.slice_weights.one_qubit == 0 || self.slice_weights.two_qubit == 0 {
            return Err(invalid("slice_weights", "durations must be at least 1"));
        }
        let mut seen = BTreeSet::new();
        for (i, &[a, b]) in self.coupling.iter().enumerate() {
            let field = format!("coupling[{i}]");
            if a >= self.n_qubits || b >= self.n_qubits {
                return Err(invalid(
                    field,
                    format!("edge ({a}, {b}) references a qubit outside 0..{}", self.n_qubits),
                ));
            }
            if a == b {
                return Err(invalid(field, format!("self-loop on qubit {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(invalid(field, format!("duplicate edge ({a}, {b})")));
            }
        }
        self.cost.validate()
    }

    pub fn noiseless(mut self) -> Self {
        self.err_1q = 0.0;
        self.err_2q = 0.0;
        self.err_ro = 0.0;
        self
    }

    /// Dense adjacency matrix of the coupling graph.
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.n_qubits]; self.n_qubits];
        for &[a, b] in &self.coupling {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.n_qubits];
        for &[a, b] in &self.coupling {
            nb[a].push(b);
            nb[b].push(a);
        }
        for list in &mut nb {
            list.sort_unstable();
        }
        nb
    }

    pub fn is_all_to_all(&self) -> bool {
        self.coupling.len() == self.n_qubits * self.n_qubits.saturating_sub(1) / 2
    }
}

/// Stochastic Pauli-injection noise parameters for the shot simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub p1q: f64,
    pub p2q: f64,
    pub p_ro: f64,
    /// Multiplier on `p2q` for gates exposed to a simultaneous neighbour.
    pub crosstalk_lambda: f64,
    pub crosstalk_enabled: bool,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            p1q: 0.0,
            p2q: 0.0,
            p_ro: 0.0,
            crosstalk_lambda: 1.0,
            crosstalk_enabled: false,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.crosstalk_lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        for (field, p) in [("p1q", self.p1q), ("p2q", self.p2q), ("p_ro", self.p_ro)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(field, format!("probability {p} outside [0, 1]")));
            }
        }
        if !(self.crosstalk_lambda.is_finite() && self.crosstalk_lambda >= 1.0) {
            return Err(invalid(
                "crosstalk_lambda",
                format!("must be >= 1, got {}", self.crosstalk_lambda),
            ));
        }
        Ok(())
    }

    /// Two-qubit error probability, amplified when `exposed` to crosstalk.
    pub fn effective_p2q(&self, exposed: bool) -> f64 {
        if exposed && self.crosstalk_enabled {
            (self.crosstalk_lambda * self.p2q).min(1.0)
        } else {
            self.p2q
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1q == 0.0 && self.p2q == 0.0 && self.p_ro == 0.0
    }
}

pub fn derive_noise_model(device: &DeviceModel) -> NoiseModel {
    let lambda = match device.technology {
        Technology::Superconducting if device.crosstalk => DEFAULT_CROSSTALK_LAMBDA,
        _ => 1.0,
    };
    NoiseModel {
        p1q: device.err_1q,
        p2q: device.err_2q,
        p_ro: device.err_ro,
        crosstalk_lambda: lambda,
        crosstalk_enabled: device.crosstalk,
    }
}

/// Native gate counts that drive both pricing and partition scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub one_qubit: usize,
    pub two_qubit: usize,
    pub measurements: usize,
}

impl GateCounts {
    pub fn of(circuit: &QuantumCircuit) -> Self {
        let mut c = GateCounts::default();
        for g in &circuit.gates {
            if g.is_measure() {
                c.measurements += 1;
            } else if g.is_single_qubit() {
                c.one_qubit += 1;
            } else if g.is_multi_qubit() {
                c.two_qubit += 1;
            }
        }
        c
    }
}

/// Credits charged for one submission of `circuit` at `shots`, with gate
/// counts taken from the circuit rebased to the device's native basis.
pub fn estimate_cost(device: &DeviceModel, circuit: &QuantumCircuit, shots: u64) -> Result<f64, DeviceError> {
    if shots == 0 {
        return Err(DeviceError::ZeroShots);
    }
    let counts = GateCounts::of(&rebase_to_basis(circuit, device.basis));
    Ok(cost_from_counts(&device.cost, counts, shots))
}

pub fn cost_from_counts(cost: &CostParams, counts: GateCounts, shots: u64) -> f64 {
    let per_shot = cost.w1q * counts.one_qubit as f64
        + cost.w2q * counts.two_qubit as f64
        + cost.wmeas * counts.measurements as f64;
    cost.fixed_per_submission + shots as f64 * per_shot / cost.divisor
}
