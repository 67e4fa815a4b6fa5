//! Success-probability metrics and the standalone-vs-simultaneous campaign.

mod suite;

pub use suite::{
    default_pairing, derive_seed, run_benchmark_suite, Aggregate, BenchmarkResult, CostSummary, PairReport,
    RuntimeSummary, SuiteConfig, SuiteReport,
};

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use thiserror::Error;

use crate::circuit::{CircuitError, QuantumCircuit};
use crate::compiler::CompileError;
use crate::device::DeviceError;
use crate::sim::{ideal_distribution, OutcomeHistogram, SimError};

pub const DEFAULT_THRESHOLD: f64 = 0.4;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no outcome of '{circuit}' reaches probability {threshold}; supply the correct set explicitly")]
    EmptyCorrectSet { circuit: String, threshold: f64 },
    #[error("correct set is empty")]
    NoCorrectOutcomes,
    #[error("outcome '{outcome}' has {got} bits, histogram has {expected}")]
    LengthMismatch {
        outcome: String,
        expected: usize,
        got: usize,
    },
    #[error("cbit ranges must tile 0..{n_bits} in order: {msg}")]
    BadRanges { n_bits: usize, msg: String },
    #[error("suite configuration: {0}")]
    Config(String),
    #[error("pair {index} ({a}, {b})")]
    Pair {
        index: usize,
        a: u32,
        b: u32,
        #[source]
        source: Box<MetricsError>,
    },
    #[error("report: {0}")]
    Report(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Device(#[from] DeviceError),
}

/// Outcomes whose ideal probability is at least [`DEFAULT_THRESHOLD`].
pub fn correct_outcomes(circuit: &QuantumCircuit) -> Result<BTreeSet<String>, MetricsError> {
    correct_outcomes_with_threshold(circuit, DEFAULT_THRESHOLD)
}

pub fn correct_outcomes_with_threshold(
    circuit: &QuantumCircuit,
    threshold: f64,
) -> Result<BTreeSet<String>, MetricsError> {
    let dist = ideal_distribution(circuit)?;
    let set: BTreeSet<String> = dist
        .probabilities
        .into_iter()
        .filter(|&(_, p)| p >= threshold)
        .map(|(k, _)| k)
        .collect();
    if set.is_empty() {
        return Err(MetricsError::EmptyCorrectSet {
            circuit: circuit.name.clone(),
            threshold,
        });
    }
    Ok(set)
}

/// Fraction of shots landing in `correct`.
pub fn compute_pst(hist: &OutcomeHistogram, correct: &BTreeSet<String>) -> Result<f64, MetricsError> {
    if correct.is_empty() {
        return Err(MetricsError::NoCorrectOutcomes);
    }
    for outcome in correct {
        if outcome.len() != hist.n_bits {
            return Err(MetricsError::LengthMismatch {
                outcome: outcome.clone(),
                expected: hist.n_bits,
                got: outcome.len(),
            });
        }
    }
    let hits: u64 = correct.iter().map(|k| hist.count(k)).sum();
    Ok(hits as f64 / hist.shots as f64)
}

/// Marginal histogram of each program in a merged run. `ranges` must
/// cover `0..n_bits` contiguously and in order.
pub fn split_merged_histogram(
    hist: &OutcomeHistogram,
    ranges: &[Range<usize>],
) -> Result<Vec<OutcomeHistogram>, MetricsError> {
    let bad = |msg: String| MetricsError::BadRanges {
        n_bits: hist.n_bits,
        msg,
    };
    let mut next = 0;
    for r in ranges {
        if r.start != next {
            return Err(bad(if r.start < next {
                format!("{r:?} overlaps the previous range")
            } else {
                format!("gap before {r:?}")
            }));
        }
        if r.end < r.start {
            return Err(bad(format!("{r:?} is reversed")));
        }
        next = r.end;
    }
    if next != hist.n_bits {
        return Err(bad(format!("ranges end at {next}")));
    }
    Ok(ranges
        .iter()
        .map(|r| {
            let mut counts: BTreeMap<String, u64> = BTreeMap::new();
            for (k, &c) in &hist.counts {
                *counts.entry(k[r.clone()].to_string()).or_insert(0) += c;
            }
            OutcomeHistogram {
                n_bits: r.len(),
                counts,
                shots: hist.shots,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{bundled_benchmarks, generate_bv, Gate};

    fn hist(pairs: &[(&str, u64)]) -> OutcomeHistogram {
        let counts: BTreeMap<String, u64> = pairs.iter().map(|&(k, c)| (k.to_string(), c)).collect();
        OutcomeHistogram {
            n_bits: pairs[0].0.len(),
            shots: counts.values().sum(),
            counts,
        }
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bv3_correct_set() {
        assert_eq!(correct_outcomes(&generate_bv("11").unwrap()).unwrap(), set(&["11"]));
    }

    #[test]
    fn manifest_expected_matches_threshold_detection() {
        for b in bundled_benchmarks() {
            assert_eq!(
                correct_outcomes(&b.circuit).unwrap(),
                set(&[&b.record.expected]),
                "{}",
                b.record.name
            );
        }
    }

    #[test]
    fn fair_coin_keeps_both_outcomes() {
        let mut c = QuantumCircuit::new("coin", 1, 1);
        c.push(Gate::h(0)).push(Gate::measure(0, 0));
        assert_eq!(correct_outcomes(&c).unwrap(), set(&["0", "1"]));
    }

    #[test]
    fn spread_distribution_has_no_correct_outcome() {
        // Uniform over four outcomes: each has probability 0.25 < 0.4.
        let mut c = QuantumCircuit::new("spread", 2, 2);
        c.push(Gate::h(0)).push(Gate::h(1)).measure_all();
        assert!(matches!(
            correct_outcomes(&c),
            Err(MetricsError::EmptyCorrectSet { .. })
        ));
    }

    #[test]
    fn pst_examples() {
        assert_eq!(compute_pst(&hist(&[("11", 8192)]), &set(&["11"])).unwrap(), 1.0);
        assert_eq!(
            compute_pst(&hist(&[("11", 50), ("00", 50)]), &set(&["11"])).unwrap(),
            0.5
        );
        assert_eq!(
            compute_pst(
                &hist(&[("0101", 30), ("1010", 20), ("0000", 50)]),
                &set(&["0101", "1010"])
            )
            .unwrap(),
            0.5
        );
        assert!(matches!(
            compute_pst(&hist(&[("11", 1)]), &set(&["111"])),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn split_examples() {
        let parts = split_merged_histogram(&hist(&[("1111", 100)]), &[0..2, 2..4]).unwrap();
        assert_eq!(parts, vec![hist(&[("11", 100)]), hist(&[("11", 100)])]);
        let parts = split_merged_histogram(&hist(&[("101", 3), ("100", 1)]), &[0..1, 1..3]).unwrap();
        assert_eq!(parts[0], hist(&[("1", 4)]));
        assert_eq!(parts[1], hist(&[("00", 1), ("01", 3)]));
        let h = hist(&[("1111", 1)]);
        assert!(matches!(
            split_merged_histogram(&h, &[0..3, 2..4]),
            Err(MetricsError::BadRanges { .. })
        ));
        assert!(matches!(
            split_merged_histogram(&h, &[0..1, 2..4]),
            Err(MetricsError::BadRanges { .. })
        ));
        assert!(matches!(
            split_merged_histogram(&h, std::slice::from_ref(&(0..3))),
            Err(MetricsError::BadRanges { .. })
        ));
    }
}
