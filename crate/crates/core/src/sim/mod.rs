//! Exact and shot-based simulation.
//!
//! Only qubits touched by some gate are simulated, so a routed circuit
//! declared over a 27-qubit device costs `2^active` amplitudes.
//!
//! Noise is stochastic Pauli injection: after every single-qubit gate a
//! uniformly random non-identity Pauli is applied with probability `p1q`,
//! after every multi-qubit gate a random non-identity Pauli word on its
//! qubits with probability `p2q` (amplified by crosstalk when the schedule
//! marks the gate as exposed), and every measured bit flips with `p_ro`.

mod statevector;

pub use statevector::StateVector;

use std::collections::BTreeMap;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{CircuitError, QuantumCircuit};
use crate::compiler::Schedule;
use crate::device::NoiseModel;
use statevector::Op;

pub const MAX_SIM_QUBITS: usize = 16;

/// Probabilities below this are dropped from a [`Distribution`].
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Memory budget for cached noiseless checkpoints per sampling run.
const CHECKPOINT_BYTES: usize = 64 << 20;

const SHOT_CHUNK: u64 = 256;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("{active} active qubits exceeds the simulator cap of {cap}")]
    TooManyQubits { active: usize, cap: usize },
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("schedule does not describe this circuit")]
    ScheduleMismatch,
    #[error("invalid noise model: {0}")]
    Noise(String),
    #[error("{0} classical bits exceeds the 64-bit outcome limit")]
    TooManyCbits(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Renders the low `n_bits` of `bits` with classical bit 0 leftmost.
pub fn format_bits(bits: u64, n_bits: usize) -> String {
    (0..n_bits)
        .map(|i| if (bits >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub n_bits: usize,
    pub probabilities: BTreeMap<String, f64>,
}

impl Distribution {
    pub fn probability(&self, outcome: &str) -> f64 {
        self.probabilities.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// Most likely outcome (lexicographically first on ties).
    pub fn mode(&self) -> Option<(&str, f64)> {
        let mut best: Option<(&str, f64)> = None;
        for (k, &p) in &self.probabilities {
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((k, p));
            }
        }
        best
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        let keys: std::collections::BTreeSet<&String> =
            self.probabilities.keys().chain(other.probabilities.keys()).collect();
        0.5 * keys
            .into_iter()
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .sum::<f64>()
    }

    /// Joint distribution of independent programs whose classical bits are
    /// concatenated (`self` first).
    pub fn tensor(&self, other: &Distribution) -> Distribution {
        let mut probabilities = BTreeMap::new();
        for (a, pa) in &self.probabilities {
            for (b, pb) in &other.probabilities {
                let p = pa * pb;
                if p >= PRUNE_THRESHOLD {
                    probabilities.insert(format!("{a}{b}"), p);
                }
            }
        }
        Distribution {
            n_bits: self.n_bits + other.n_bits,
            probabilities,
        }
    }

    /// Marginal over the classical bits in `range`.
    pub fn marginal(&self, range: Range<usize>) -> Distribution {
        let mut probabilities = BTreeMap::new();
        for (k, p) in &self.probabilities {
            *probabilities.entry(k[range.clone()].to_string()).or_insert(0.0) += p;
        }
        Distribution {
            n_bits: range.len(),
            probabilities,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeHistogram {
    pub n_bits: usize,
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl OutcomeHistogram {
    pub fn count(&self, outcome: &str) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn frequency(&self, outcome: &str) -> f64 {
        self.count(outcome) as f64 / self.shots as f64
    }

    /// Outcome with the highest count (lexicographically first on ties).
    pub fn mode(&self) -> Option<(&str, u64)> {
        let mut best: Option<(&str, u64)> = None;
        for (k, &c) in &self.counts {
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((k, c));
            }
        }
        best
    }

    pub fn to_distribution(&self) -> Distribution {
        Distribution {
            n_bits: self.n_bits,
            probabilities: self
                .counts
                .iter()
                .map(|(k, &c)| (k.clone(), c as f64 / self.shots as f64))
                .collect(),
        }
    }
}

/// A circuit lowered onto its active qubits.
struct Lowered {
    n_active: usize,
    ops: Vec<Op>,
    /// `(compact qubit, cbit)` for every measurement.
    measure_map: Vec<(usize, usize)>,
    n_cbits: usize,
}

impl Lowered {
    fn new(circuit: &QuantumCircuit) -> Result<Self, SimError> {
        circuit.validate()?;
        circuit.check_terminal_measurements()?;
        if circuit.n_cbits > 64 {
            return Err(SimError::TooManyCbits(circuit.n_cbits));
        }
        let active = circuit.active_qubits();
        if active.len() > MAX_SIM_QUBITS {
            return Err(SimError::TooManyQubits {
                active: active.len(),
                cap: MAX_SIM_QUBITS,
            });
        }
        let mut map = vec![usize::MAX; circuit.n_qubits];
        for (i, &q) in active.iter().enumerate() {
            map[q] = i;
        }
        let ops = circuit
            .gates
            .iter()
            .map(|g| {
                if g.kind == crate::circuit::GateKind::Barrier {
                    Op::Nop
                } else {
                    Op::lower(g, &map)
                }
            })
            .collect();
        let measure_map = circuit.measurements().into_iter().map(|(q, c)| (map[q], c)).collect();
        Ok(Self {
            n_active: active.len(),
            ops,
            measure_map,
            n_cbits: circuit.n_cbits,
        })
    }

    fn outcome_bits(&self, index: usize) -> u64 {
        self.measure_map
            .iter()
            .fold(0u64, |acc, &(q, c)| acc | ((((index >> q) & 1) as u64) << c))
    }

    fn evolve_ideal(&self) -> StateVector {
        let mut sv = StateVector::zero(self.n_active);
        for op in &self.ops {
            sv.apply_op(op);
        }
        sv
    }
}

/// Exact noiseless outcome distribution over the circuit's classical bits.
/// Unmeasured classical bits read `0`.
pub fn ideal_distribution(circuit: &QuantumCircuit) -> Result<Distribution, SimError> {
    let lowered = Lowered::new(circuit)?;
    let sv = lowered.evolve_ideal();
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    for (i, p) in sv.probabilities().into_iter().enumerate() {
        if p > 0.0 {
            *acc.entry(lowered.outcome_bits(i)).or_insert(0.0) += p;
        }
    }
    let probabilities = acc
        .into_iter()
        .filter(|&(_, p)| p >= PRUNE_THRESHOLD)
        .map(|(bits, p)| (format_bits(bits, lowered.n_cbits), p))
        .collect();
    Ok(Distribution {
        n_bits: lowered.n_cbits,
        probabilities,
    })
}

/// Inverse-CDF sampling table over full basis-state indices.
struct Cdf(Vec<f64>);

impl Cdf {
    fn new(probs: impl Iterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        Cdf(probs
            .map(|p| {
                acc += p;
                acc
            })
            .collect())
    }

    fn sample(&self, u: f64) -> usize {
        let total = *self.0.last().unwrap_or(&1.0);
        let target = u * total;
        self.0.partition_point(|&c| c <= target).min(self.0.len() - 1)
    }
}

/// Shared, read-only state for one sampling run.
struct Sampler<'a> {
    lowered: &'a Lowered,
    /// Error probability after each op (0 for measurements and barriers).
    gate_error: Vec<f64>,
    /// Number of qubits the injected Pauli word spans, per op.
    arity: Vec<usize>,
    p_ro: f64,
    ideal_cdf: Cdf,
    /// `(op index, state before that op)`, ascending.
    checkpoints: Vec<(usize, StateVector)>,
}

impl Sampler<'_> {
    fn shot(&self, seed: u64, index: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);

        let mut events: Vec<(usize, usize)> = Vec::new();
        for (op, &p) in self.gate_error.iter().enumerate() {
            if p > 0.0 && rng.gen::<f64>() < p {
                let words = 1usize << (2 * self.arity[op]);
                events.push((op, rng.gen_range(1..words)));
            }
        }

        let u: f64 = rng.gen();
        let index = if events.is_empty() {
            self.ideal_cdf.sample(u)
        } else {
            let first = events[0].0;
            let k = self.checkpoints.partition_point(|(i, _)| *i <= first) - 1;
            let (start, state) = &self.checkpoints[k];
            let mut sv = state.clone();
            let mut pending = events.iter().peekable();
            for (i, op) in self.lowered.ops.iter().enumerate().skip(*start) {
                sv.apply_op(op);
                while let Some(&&(at, code)) = pending.peek() {
                    if at != i {
                        break;
                    }
                    sv.apply_pauli(&op.qubits(), code);
                    pending.next();
                }
            }
            Cdf::new(sv.amplitudes().iter().map(|a| a.norm_sqr())).sample(u)
        };

        let mut bits = self.lowered.outcome_bits(index);
        if self.p_ro > 0.0 {
            for &(_, c) in &self.lowered.measure_map {
                if rng.gen::<f64>() < self.p_ro {
                    bits ^= 1 << c;
                }
            }
        }
        bits
    }
}

/// Monte Carlo sampling under `noise`. Shot `i` draws all of its randomness
/// from a ChaCha8 stream keyed by `(seed, i)`, so the histogram is identical
/// for any degree of parallelism.
pub fn sample_counts(
    circuit: &QuantumCircuit,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
    schedule: Option<&Schedule>,
) -> Result<OutcomeHistogram, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    noise.validate().map_err(|e| SimError::Noise(e.to_string()))?;
    if let Some(s) = schedule {
        if !s.matches(circuit) {
            return Err(SimError::ScheduleMismatch);
        }
    }
    let lowered = Lowered::new(circuit)?;

    let mut gate_error = Vec::with_capacity(circuit.gates.len());
    let mut arity = Vec::with_capacity(circuit.gates.len());
    for (i, g) in circuit.gates.iter().enumerate() {
        let p = if g.is_single_qubit() {
            noise.p1q
        } else if g.is_multi_qubit() {
            let exposed = schedule.is_some_and(|s| s.crosstalk_exposed[i]);
            noise.effective_p2q(exposed)
        } else {
            0.0
        };
        gate_error.push(p);
        arity.push(g.qubits.len());
    }

    let state_bytes = (16usize << lowered.n_active).max(1);
    let n_ops = lowered.ops.len().max(1);
    let stride = (n_ops * state_bytes).div_ceil(CHECKPOINT_BYTES).max(1);
    let mut checkpoints = Vec::new();
    let mut sv = StateVector::zero(lowered.n_active);
    for (i, op) in lowered.ops.iter().enumerate() {
        if i % stride == 0 {
            checkpoints.push((i, sv.clone()));
        }
        sv.apply_op(op);
    }
    if checkpoints.is_empty() {
        checkpoints.push((0, sv.clone()));
    }
    let ideal_cdf = Cdf::new(sv.amplitudes().iter().map(|a| a.norm_sqr()));

    let sampler = Sampler {
        lowered: &lowered,
        gate_error,
        arity,
        p_ro: noise.p_ro,
        ideal_cdf,
        checkpoints,
    };

    let by_bits: BTreeMap<u64, u64> = (0..shots.div_ceil(SHOT_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut local = BTreeMap::new();
            for i in chunk * SHOT_CHUNK..((chunk + 1) * SHOT_CHUNK).min(shots) {
                *local.entry(sampler.shot(seed, i)).or_insert(0u64) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(OutcomeHistogram {
        n_bits: lowered.n_cbits,
        counts: by_bits
            .into_iter()
            .map(|(b, c)| (format_bits(b, lowered.n_cbits), c))
            .collect(),
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{generate_bv, Gate};

    #[test]
    fn bit_order_puts_cbit_zero_first() {
        assert_eq!(format_bits(0b001, 3), "100");
        assert_eq!(format_bits(0b110, 3), "011");
    }

    #[test]
    fn bv_is_deterministic() {
        let d = ideal_distribution(&generate_bv("11").unwrap()).unwrap();
        assert_eq!(d.n_bits, 2);
        assert_eq!(d.probabilities.len(), 1);
        assert!((d.probability("11") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_is_fair() {
        let mut c = QuantumCircuit::new("h", 1, 1);
        c.push(Gate::h(0)).push(Gate::measure(0, 0));
        let d = ideal_distribution(&c).unwrap();
        assert!((d.probability("0") - 0.5).abs() < 1e-12);
        assert!((d.probability("1") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn idle_qubits_are_not_simulated() {
        let mut c = QuantumCircuit::new("wide", 27, 1);
        c.push(Gate::x(20)).push(Gate::measure(20, 0));
        let d = ideal_distribution(&c).unwrap();
        assert_eq!(d.probability("1"), 1.0);
        let mut big = QuantumCircuit::new("big", 17, 0);
        for q in 0..17 {
            big.push(Gate::h(q));
        }
        assert_eq!(
            ideal_distribution(&big),
            Err(SimError::TooManyQubits { active: 17, cap: 16 })
        );
    }

    #[test]
    fn noiseless_sampling_is_exact() {
        let bv = generate_bv("11").unwrap();
        let h = sample_counts(&bv, &NoiseModel::noiseless(), 8192, 7, None).unwrap();
        assert_eq!(h.count("11"), 8192);
        assert_eq!(h.counts.len(), 1);
    }

    #[test]
    fn zero_shots_rejected() {
        let bv = generate_bv("1").unwrap();
        assert_eq!(
            sample_counts(&bv, &NoiseModel::noiseless(), 0, 1, None),
            Err(SimError::ZeroShots)
        );
    }

    #[test]
    fn cdf_handles_edges() {
        let cdf = Cdf::new([0.0, 0.5, 0.0, 0.5].into_iter());
        assert_eq!(cdf.sample(0.0), 1);
        assert_eq!(cdf.sample(0.49), 1);
        assert_eq!(cdf.sample(0.5), 3);
        assert_eq!(cdf.sample(0.999999), 3);
    }

    #[test]
    fn tensor_and_marginal() {
        let a = ideal_distribution(&generate_bv("10").unwrap()).unwrap();
        let mut h = QuantumCircuit::new("h", 1, 1);
        h.push(Gate::h(0)).push(Gate::measure(0, 0));
        let b = ideal_distribution(&h).unwrap();
        let joint = a.tensor(&b);
        assert_eq!(joint.n_bits, 3);
        assert!((joint.probability("101") - 0.5).abs() < 1e-12);
        assert!(joint.marginal(0..2).total_variation(&a) < 1e-12);
    }
}
