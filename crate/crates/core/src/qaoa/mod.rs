//! Max-Cut QAOA: graphs, ansatz construction, expectation values,
//! derivative-free optimization and multi-programmed execution.
//!
//! The ansatz is `H^⊗n`, then per layer `k` a `ZZ(γ_k·w)` on every edge
//! followed by `Rx(2β_k)` on every qubit, then measurement of qubit `i`
//! into classical bit `i`. With `ZZ(θ) = exp(−iθ/2·Z⊗Z)` the cost layer is
//! `exp(iγ_k·C)` up to a global phase, where `C` counts cut edge weight.

mod optimize;
mod parallel;

pub use optimize::{optimize_parameters, OptimizeResult, OptimizerConfig};
pub use parallel::{run_parallel_qaoa, CopyResult, QaoaConfig, QaoaReport};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Gate, QuantumCircuit};
use crate::compiler::CompileError;
use crate::device::DeviceError;
use crate::metrics::MetricsError;
use crate::sim::{ideal_distribution, Distribution, OutcomeHistogram, SimError};

pub const MAX_BRUTE_FORCE_NODES: usize = 20;

#[derive(Debug, Error)]
pub enum QaoaError {
    #[error("graph line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("{n} nodes exceeds the brute-force limit of {MAX_BRUTE_FORCE_NODES}")]
    TooManyNodes { n: usize },
    #[error("parameters need p ≥ 1 and {gammas} gammas to match {betas} betas")]
    BadParams { gammas: usize, betas: usize },
    #[error("max_evals = {max_evals} is below the {needed} evaluations of the initial model")]
    InsufficientBudget { max_evals: usize, needed: usize },
    #[error("outcome '{outcome}' has {got} bits, graph has {expected} nodes")]
    LengthMismatch {
        outcome: String,
        expected: usize,
        got: usize,
    },
    #[error("{copies} copies of a {nodes}-node ansatz need {needed} qubits, device has {available}")]
    Capacity {
        copies: usize,
        nodes: usize,
        needed: usize,
        available: usize,
    },
    #[error("report: {0}")]
    Report(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Device(#[from] DeviceError),
}

/// Undirected weighted graph; each edge is stored once with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self, QaoaError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(QaoaError::Graph(format!("self-loop on node {a}")));
            }
            if a >= n_nodes || b >= n_nodes {
                return Err(QaoaError::Graph(format!("edge ({a}, {b}) outside {n_nodes} nodes")));
            }
            if !w.is_finite() {
                return Err(QaoaError::Graph(format!("edge ({a}, {b}) has weight {w}")));
            }
            let (u, v) = (a.min(b), a.max(b));
            if !seen.insert((u, v)) {
                return Err(QaoaError::Graph(format!("duplicate edge ({u}, {v})")));
            }
            out.push((u, v, w));
        }
        Ok(Self { n_nodes, edges: out })
    }

    /// Unit-weight cycle `0-1-…-(n−1)-0`.
    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).expect("cycle with n ≥ 3 is valid")
    }

    /// Edge-list text: the node count on the first non-comment line, then
    /// `u v [w]` per edge. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, QaoaError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(QaoaError::Parse {
            line: 1,
            msg: "missing node count".into(),
        })?;
        let n_nodes: usize = header.parse().map_err(|_| QaoaError::Parse {
            line,
            msg: format!("expected a node count, found '{header}'"),
        })?;
        let mut edges = Vec::new();
        for (line, text) in lines {
            let err = |msg: String| QaoaError::Parse { line, msg };
            let fields: Vec<&str> = text.split_whitespace().collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(err(format!("expected 'u v [w]', found '{text}'")));
            }
            let node = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad node '{s}'")));
            let w = match fields.get(2) {
                Some(s) => s.parse::<f64>().map_err(|_| err(format!("bad weight '{s}'")))?,
                None => 1.0,
            };
            edges.push((node(fields[0])?, node(fields[1])?, w));
        }
        Self::new(n_nodes, edges).map_err(|e| QaoaError::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n_nodes);
        for &(u, v, w) in &self.edges {
            if w == 1.0 {
                s += &format!("{u} {v}\n");
            } else {
                s += &format!("{u} {v} {w:?}\n");
            }
        }
        s
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().fold(0.0, |acc, e| acc + e.2)
    }

    /// Cut weight of an assignment given as a bitstring, node `i` at index `i`.
    pub fn cut_value(&self, bits: &str) -> Result<f64, QaoaError> {
        if bits.len() != self.n_nodes {
            return Err(QaoaError::LengthMismatch {
                outcome: bits.to_string(),
                expected: self.n_nodes,
                got: bits.len(),
            });
        }
        let b = bits.as_bytes();
        Ok(self
            .edges
            .iter()
            .filter(|e| b[e.0] != b[e.1])
            .fold(0.0, |acc, e| acc + e.2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, QaoaError> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(QaoaError::BadParams {
                gammas: gammas.len(),
                betas: betas.len(),
            });
        }
        Ok(Self { gammas, betas })
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    /// Flattened `[γ_1…γ_p, β_1…β_p]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_slice(x: &[f64]) -> Self {
        let p = x.len() / 2;
        Self {
            gammas: x[..p].to_vec(),
            betas: x[p..].to_vec(),
        }
    }
}

/// Maximum cut weight and every bitstring attaining it.
pub fn brute_force_maxcut(graph: &Graph) -> Result<(f64, BTreeSet<String>), QaoaError> {
    let n = graph.n_nodes;
    if n > MAX_BRUTE_FORCE_NODES {
        return Err(QaoaError::TooManyNodes { n });
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for x in 0u32..(1 << n) {
        let cut: f64 = graph
            .edges
            .iter()
            .filter(|e| ((x >> e.0) ^ (x >> e.1)) & 1 == 1)
            .fold(0.0, |acc, e| acc + e.2);
        if cut > best {
            best = cut;
            argmax.clear();
        }
        if cut == best {
            argmax.push(x);
        }
    }
    let set = argmax
        .into_iter()
        .map(|x| crate::sim::format_bits(x as u64, n))
        .collect();
    Ok((best, set))
}

pub fn build_qaoa_ansatz(graph: &Graph, params: &QaoaParams) -> QuantumCircuit {
    let n = graph.n_nodes;
    let mut c = QuantumCircuit::new(format!("qaoa_p{}", params.p()), n, n);
    for q in 0..n {
        c.push(Gate::h(q));
    }
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for &(u, v, w) in &graph.edges {
            c.push(Gate::zz(gamma * w, u, v));
        }
        for q in 0..n {
            c.push(Gate::rx(2.0 * beta, q));
        }
    }
    c.measure_all();
    c
}

/// Anything that assigns weights to bitstring outcomes.
pub trait Outcomes {
    fn weighted(&self) -> Vec<(&str, f64)>;
}

impl Outcomes for Distribution {
    fn weighted(&self) -> Vec<(&str, f64)> {
        self.probabilities.iter().map(|(k, &p)| (k.as_str(), p)).collect()
    }
}

impl Outcomes for OutcomeHistogram {
    fn weighted(&self) -> Vec<(&str, f64)> {
        self.counts
            .iter()
            .map(|(k, &c)| (k.as_str(), c as f64 / self.shots as f64))
            .collect()
    }
}

/// `Σ probability × cut value` over the outcomes.
pub fn maxcut_expectation(outcomes: &impl Outcomes, graph: &Graph) -> Result<f64, QaoaError> {
    outcomes
        .weighted()
        .into_iter()
        .map(|(k, p)| Ok(p * graph.cut_value(k)?))
        .sum()
}

/// Exact expectation of the ansatz at `params`.
pub fn ideal_expectation(graph: &Graph, params: &QaoaParams) -> Result<f64, QaoaError> {
    let dist = ideal_distribution(&build_qaoa_ansatz(graph, params))?;
    maxcut_expectation(&dist, graph)
}
