use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{compute_pst, split_merged_histogram, MetricsError};
use crate::circuit::{load_benchmark, Benchmark};
use crate::compiler::{compile_batch, Allocation, CompiledBatch, Schedule};
use crate::device::{estimate_cost, DeviceModel, NoiseModel};
use crate::sim::sample_counts;

/// Everything a campaign depends on. A report embeds its config, so
/// re-running that config reproduces the report exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub device: DeviceModel,
    pub noise: NoiseModel,
    pub pairing: Vec<[u32; 2]>,
    pub shots: u64,
    pub seeds: Vec<u64>,
}

/// Consecutive benchmark ids paired up, with the odd one out paired
/// against the first.
pub fn default_pairing() -> Vec<[u32; 2]> {
    vec![[1, 2], [3, 4], [5, 6], [7, 8], [9, 1]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub independent: f64,
    pub merged: f64,
    /// `1 − merged / independent`.
    pub savings: f64,
}

impl CostSummary {
    pub fn new(independent: f64, merged: f64) -> Self {
        Self {
            independent,
            merged,
            savings: 1.0 - merged / independent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeSummary {
    /// Sum of the standalone schedule durations, in slices.
    pub independent_slices: usize,
    pub merged_slices: usize,
    /// `1 − merged_slices / independent_slices`.
    pub savings: f64,
}

impl RuntimeSummary {
    pub fn new(independent_slices: usize, merged_slices: usize) -> Self {
        Self {
            independent_slices,
            merged_slices,
            savings: 1.0 - merged_slices as f64 / independent_slices as f64,
        }
    }
}

/// One benchmark within one pair, in both execution modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub pair: usize,
    pub id: u32,
    pub name: String,
    pub correct: BTreeSet<String>,
    pub standalone_pst: f64,
    pub simultaneous_pst: f64,
    /// `simultaneous − standalone`.
    pub delta: f64,
    pub standalone_by_seed: Vec<f64>,
    pub simultaneous_by_seed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub index: usize,
    pub ids: [u32; 2],
    pub allocation: Allocation,
    pub standalone_allocations: Vec<Allocation>,
    pub schedule: Schedule,
    pub standalone_durations: Vec<usize>,
    pub standalone_costs: Vec<f64>,
    pub cost: CostSummary,
    pub runtime: RuntimeSummary,
    /// Mean over the two programs and all seeds.
    pub standalone_pst: f64,
    pub simultaneous_pst: f64,
    /// `standalone − simultaneous`.
    pub drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean_standalone_pst: f64,
    pub mean_simultaneous_pst: f64,
    /// Mean over benchmark records of `simultaneous − standalone`.
    pub mean_delta: f64,
    /// Mean over pairs of the pair drop (primary figure).
    pub mean_drop: f64,
    /// Difference of the pair-mean PSTs, computed separately.
    pub drop_of_means: f64,
    /// Binomial standard error of `mean_drop`.
    pub drop_sigma: f64,
    /// Mean over pairs of `drop / standalone`.
    pub mean_relative_drop: f64,
    pub relative_drop_of_means: f64,
    pub cost: CostSummary,
    pub runtime: RuntimeSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub pairs: Vec<PairReport>,
    pub records: Vec<BenchmarkResult>,
    pub aggregate: Aggregate,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, MetricsError> {
        serde_json::from_str(text).map_err(|e| MetricsError::Report(e.to_string()))
    }

    /// One row per benchmark × mode × seed.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["pair", "id", "name", "mode", "seed", "shots", "pst"])
            .expect("in-memory write");
        for r in &self.records {
            for (mode, values) in [
                ("standalone", &r.standalone_by_seed),
                ("simultaneous", &r.simultaneous_by_seed),
            ] {
                for (seed, pst) in self.config.seeds.iter().zip(values) {
                    w.write_record([
                        r.pair.to_string(),
                        r.id.to_string(),
                        r.name.clone(),
                        mode.to_string(),
                        seed.to_string(),
                        self.config.shots.to_string(),
                        pst.to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Sampling seed for one run: `stream` 0 is the merged circuit, `k + 1`
/// the standalone run of program `k`.
pub fn derive_seed(seed: u64, pair: usize, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ pair as u64) ^ stream)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn binomial_var(p: f64, shots: u64) -> f64 {
    p * (1.0 - p) / shots as f64
}

struct PairOutcome {
    report: PairReport,
    records: [BenchmarkResult; 2],
    /// Summed binomial variance of the per-seed pair drops.
    drop_var: f64,
}

fn correct_set(b: &Benchmark) -> Result<BTreeSet<String>, MetricsError> {
    if b.record.expected.is_empty() {
        super::correct_outcomes(&b.circuit)
    } else {
        Ok(BTreeSet::from([b.record.expected.clone()]))
    }
}

fn run_pair(config: &SuiteConfig, index: usize, ids: [u32; 2]) -> Result<PairOutcome, MetricsError> {
    let device = &config.device;
    let benches = [
        load_benchmark(&ids[0].to_string())?,
        load_benchmark(&ids[1].to_string())?,
    ];
    let correct = [correct_set(&benches[0])?, correct_set(&benches[1])?];
    let programs = [benches[0].circuit.clone(), benches[1].circuit.clone()];

    let merged = compile_batch(device, &programs)?;
    let alone: Vec<CompiledBatch> = programs
        .iter()
        .map(|p| compile_batch(device, std::slice::from_ref(p)))
        .collect::<Result<_, _>>()?;

    let mut sim = [Vec::new(), Vec::new()];
    let mut solo = [Vec::new(), Vec::new()];
    for &seed in &config.seeds {
        let hist = sample_counts(
            &merged.merged,
            &config.noise,
            config.shots,
            derive_seed(seed, index, 0),
            Some(&merged.schedule),
        )?;
        for (k, part) in split_merged_histogram(&hist, &merged.cbit_ranges)?.iter().enumerate() {
            sim[k].push(compute_pst(part, &correct[k])?);
        }
        for (k, batch) in alone.iter().enumerate() {
            let hist = sample_counts(
                &batch.merged,
                &config.noise,
                config.shots,
                derive_seed(seed, index, k as u64 + 1),
                Some(&batch.schedule),
            )?;
            solo[k].push(compute_pst(&hist, &correct[k])?);
        }
    }

    let standalone_costs = alone
        .iter()
        .map(|b| estimate_cost(device, &b.merged, config.shots))
        .collect::<Result<Vec<_>, _>>()?;
    let merged_cost = estimate_cost(device, &merged.merged, config.shots)?;
    let standalone_durations: Vec<usize> = alone.iter().map(|b| b.schedule.duration).collect();

    let records = [0, 1].map(|k| {
        let standalone_pst = mean(&solo[k]);
        let simultaneous_pst = mean(&sim[k]);
        BenchmarkResult {
            pair: index,
            id: ids[k],
            name: benches[k].record.name.clone(),
            correct: correct[k].clone(),
            standalone_pst,
            simultaneous_pst,
            delta: simultaneous_pst - standalone_pst,
            standalone_by_seed: solo[k].clone(),
            simultaneous_by_seed: sim[k].clone(),
        }
    });
    let drop_var = (0..config.seeds.len())
        .map(|s| {
            (0..2)
                .map(|k| binomial_var(solo[k][s], config.shots) + binomial_var(sim[k][s], config.shots))
                .sum::<f64>()
                / 4.0
        })
        .sum::<f64>();
    let standalone_pst = (records[0].standalone_pst + records[1].standalone_pst) / 2.0;
    let simultaneous_pst = (records[0].simultaneous_pst + records[1].simultaneous_pst) / 2.0;

    Ok(PairOutcome {
        report: PairReport {
            index,
            ids,
            allocation: merged.allocation.clone(),
            standalone_allocations: alone.iter().map(|b| b.allocation.clone()).collect(),
            schedule: merged.schedule.clone(),
            cost: CostSummary::new(standalone_costs.iter().sum(), merged_cost),
            runtime: RuntimeSummary::new(standalone_durations.iter().sum(), merged.schedule.duration),
            standalone_durations,
            standalone_costs,
            standalone_pst,
            simultaneous_pst,
            drop: standalone_pst - simultaneous_pst,
        },
        records,
        drop_var,
    })
}

/// Runs every pair simultaneously and each member standalone (on its own
/// best partition), for every seed, and aggregates PSTs and savings.
pub fn run_benchmark_suite(config: &SuiteConfig) -> Result<SuiteReport, MetricsError> {
    if config.pairing.is_empty() {
        return Err(MetricsError::Config("pairing is empty".into()));
    }
    if config.seeds.is_empty() {
        return Err(MetricsError::Config("seed list is empty".into()));
    }
    if config.shots == 0 {
        return Err(MetricsError::Config("shots must be at least 1".into()));
    }
    config.device.validate()?;
    config.noise.validate()?;

    let mut pairs = Vec::new();
    let mut records = Vec::new();
    let mut drop_var = 0.0;
    for (index, &ids) in config.pairing.iter().enumerate() {
        let out = run_pair(config, index, ids).map_err(|e| MetricsError::Pair {
            index,
            a: ids[0],
            b: ids[1],
            source: Box::new(e),
        })?;
        pairs.push(out.report);
        records.extend(out.records);
        drop_var += out.drop_var;
    }

    let n_pairs = pairs.len() as f64;
    let n_seeds = config.seeds.len() as f64;
    let pair_standalone: Vec<f64> = pairs.iter().map(|p| p.standalone_pst).collect();
    let pair_simultaneous: Vec<f64> = pairs.iter().map(|p| p.simultaneous_pst).collect();
    let mean_standalone_pst = mean(&pair_standalone);
    let mean_simultaneous_pst = mean(&pair_simultaneous);
    let drop_of_means = mean_standalone_pst - mean_simultaneous_pst;
    let aggregate = Aggregate {
        mean_standalone_pst,
        mean_simultaneous_pst,
        mean_delta: mean(&records.iter().map(|r| r.delta).collect::<Vec<_>>()),
        mean_drop: mean(&pairs.iter().map(|p| p.drop).collect::<Vec<_>>()),
        drop_of_means,
        drop_sigma: (drop_var / (n_pairs * n_seeds).powi(2)).sqrt(),
        mean_relative_drop: mean(&pairs.iter().map(|p| p.drop / p.standalone_pst).collect::<Vec<_>>()),
        relative_drop_of_means: drop_of_means / mean_standalone_pst,
        cost: CostSummary::new(
            pairs.iter().map(|p| p.cost.independent).sum(),
            pairs.iter().map(|p| p.cost.merged).sum(),
        ),
        runtime: RuntimeSummary::new(
            pairs.iter().map(|p| p.runtime.independent_slices).sum(),
            pairs.iter().map(|p| p.runtime.merged_slices).sum(),
        ),
    };
    Ok(SuiteReport {
        config: config.clone(),
        pairs,
        records,
        aggregate,
    })
}
