//! Bernstein–Vazirani generator and the bundled benchmark set.

use serde::{Deserialize, Serialize};

use super::{parse_qasm, CircuitError, Gate, QuantumCircuit};

/// BV circuit for `hidden`: data qubits `0..n`, ancilla `n`. Measuring the
/// data register yields `hidden` (character `i` is classical bit `i`).
pub fn generate_bv(hidden: &str) -> Result<QuantumCircuit, CircuitError> {
    if hidden.is_empty() || !hidden.chars().all(|c| c == '0' || c == '1') {
        return Err(CircuitError::InvalidHiddenString);
    }
    let n = hidden.len();
    let anc = n;
    let mut c = QuantumCircuit::new(format!("bv_{hidden}"), n + 1, n);
    c.push(Gate::x(anc));
    for q in 0..=n {
        c.push(Gate::h(q));
    }
    for (i, bit) in hidden.chars().enumerate() {
        if bit == '1' {
            c.push(Gate::cx(i, anc));
        }
    }
    for q in 0..=n {
        c.push(Gate::h(q));
    }
    for q in 0..n {
        c.push(Gate::measure(q, q));
    }
    Ok(c)
}

/// One manifest entry. `gates`/`cx` are the published reference counts
/// after Toffoli expansion; only `n_qubits` is enforced at load time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkRecord {
    pub id: u32,
    pub name: String,
    pub file: String,
    pub n_qubits: usize,
    pub gates: usize,
    pub cx: usize,
    /// Outcome bitstring the noiseless circuit produces.
    pub expected: String,
    /// Hidden string for programmatically generated BV circuits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkManifest {
    pub benchmark: Vec<BenchmarkRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub record: BenchmarkRecord,
    pub circuit: QuantumCircuit,
}

const MANIFEST: &str = include_str!("../../../../benchmarks/manifest.toml");

const FIXTURES: &[(&str, &str)] = &[
    ("bv3.qasm", include_str!("../../../../benchmarks/bv3.qasm")),
    ("bv4.qasm", include_str!("../../../../benchmarks/bv4.qasm")),
    ("peres_3.qasm", include_str!("../../../../benchmarks/peres_3.qasm")),
    ("toffoli.qasm", include_str!("../../../../benchmarks/toffoli.qasm")),
    ("3_17_13.qasm", include_str!("../../../../benchmarks/3_17_13.qasm")),
    (
        "4mod5-v1_22.qasm",
        include_str!("../../../../benchmarks/4mod5-v1_22.qasm"),
    ),
    (
        "mod5mils_65.qasm",
        include_str!("../../../../benchmarks/mod5mils_65.qasm"),
    ),
    ("alu-v0_27.qasm", include_str!("../../../../benchmarks/alu-v0_27.qasm")),
    (
        "decod24-v2_43.qasm",
        include_str!("../../../../benchmarks/decod24-v2_43.qasm"),
    ),
];

impl BenchmarkManifest {
    pub fn bundled() -> Self {
        toml::from_str(MANIFEST).expect("bundled manifest is valid")
    }

    pub fn parse(text: &str) -> Result<Self, CircuitError> {
        toml::from_str(text).map_err(|e| CircuitError::Manifest(e.to_string()))
    }
}

fn fixture_text(file: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(f, _)| *f == file).map(|(_, t)| *t)
}

fn materialize(record: &BenchmarkRecord) -> Result<Benchmark, CircuitError> {
    let mut circuit = match &record.hidden {
        Some(hidden) => generate_bv(hidden)?,
        None => {
            let text = fixture_text(&record.file)
                .ok_or_else(|| CircuitError::Manifest(format!("missing fixture {}", record.file)))?;
            parse_qasm(text).map_err(|e| CircuitError::Manifest(format!("{}: {e}", record.file)))?
        }
    };
    if circuit.n_qubits != record.n_qubits {
        return Err(CircuitError::Manifest(format!(
            "{} declares {} qubits but the circuit has {}",
            record.name, record.n_qubits, circuit.n_qubits
        )));
    }
    circuit.name = record.name.clone();
    Ok(Benchmark {
        record: record.clone(),
        circuit,
    })
}

/// The nine bundled benchmarks in manifest (id) order.
pub fn bundled_benchmarks() -> Vec<Benchmark> {
    BenchmarkManifest::bundled()
        .benchmark
        .iter()
        .map(|r| materialize(r).expect("bundled benchmark is valid"))
        .collect()
}

/// Looks a bundled benchmark up by numeric id or by name.
pub fn load_benchmark(key: &str) -> Result<Benchmark, CircuitError> {
    let manifest = BenchmarkManifest::bundled();
    let record = manifest
        .benchmark
        .iter()
        .find(|r| r.name == key || r.id.to_string() == key)
        .ok_or_else(|| CircuitError::UnknownBenchmark(key.to_string()))?;
    materialize(record)
}
