use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{
    brute_force_maxcut, build_qaoa_ansatz, ideal_expectation, optimize_parameters, Graph, OptimizeResult,
    OptimizerConfig, QaoaError,
};
use crate::circuit::QuantumCircuit;
use crate::compiler::compile_batch;
use crate::device::{estimate_cost, DeviceModel, NoiseModel};
use crate::metrics::{compute_pst, derive_seed, split_merged_histogram, CostSummary, RuntimeSummary};
use crate::sim::{ideal_distribution, sample_counts, OutcomeHistogram};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaoaConfig {
    pub device: DeviceModel,
    pub noise: NoiseModel,
    pub graph: Graph,
    pub p: usize,
    pub copies: usize,
    pub shots: u64,
    pub seed: u64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopyResult {
    pub embedding: Vec<usize>,
    pub histogram: OutcomeHistogram,
    /// Fraction of shots on an optimal cut.
    pub success_mass: f64,
    /// Most frequent outcome (lexicographically first on ties).
    pub modal_outcome: String,
    pub modal_is_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaReport {
    pub config: QaoaConfig,
    pub max_cut: f64,
    pub optimal: BTreeSet<String>,
    pub optimized: OptimizeResult,
    /// Ideal probability of each optimal bitstring at the optimized angles.
    pub ideal_optimal_probabilities: Vec<(String, f64)>,
    pub copies: Vec<CopyResult>,
    pub standalone: CopyResult,
    pub cost: CostSummary,
    pub runtime: RuntimeSummary,
}

impl QaoaReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, QaoaError> {
        serde_json::from_str(text).map_err(|e| QaoaError::Report(e.to_string()))
    }

    /// One row per run × observed outcome; `run` is `copy<k>` or
    /// `standalone`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["run", "outcome", "count", "shots", "cut", "optimal"])
            .expect("in-memory write");
        let runs = self
            .copies
            .iter()
            .enumerate()
            .map(|(k, c)| (format!("copy{k}"), c))
            .chain([("standalone".to_string(), &self.standalone)]);
        for (name, run) in runs {
            for (outcome, count) in &run.histogram.counts {
                let cut = self.config.graph.cut_value(outcome).unwrap_or(f64::NAN);
                w.write_record([
                    name.clone(),
                    outcome.clone(),
                    count.to_string(),
                    run.histogram.shots.to_string(),
                    cut.to_string(),
                    self.optimal.contains(outcome).to_string(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn summarize(
    embedding: Vec<usize>,
    histogram: OutcomeHistogram,
    optimal: &BTreeSet<String>,
) -> Result<CopyResult, QaoaError> {
    let success_mass = compute_pst(&histogram, optimal)?;
    let modal_outcome = histogram.mode().map(|(k, _)| k.to_string()).unwrap_or_default();
    Ok(CopyResult {
        embedding,
        modal_is_optimal: optimal.contains(&modal_outcome),
        histogram,
        success_mass,
        modal_outcome,
    })
}

/// Optimizes the ansatz once on the exact evaluator, then runs `copies`
/// identical instances side by side through the multi-programming pipeline
/// and one instance alone for reference.
pub fn run_parallel_qaoa(config: &QaoaConfig) -> Result<QaoaReport, QaoaError> {
    let device = &config.device;
    let n = config.graph.n_nodes;
    let needed = config.copies * n;
    if config.copies == 0 || needed > device.n_qubits {
        return Err(QaoaError::Capacity {
            copies: config.copies,
            nodes: n,
            needed,
            available: device.n_qubits,
        });
    }
    let (max_cut, optimal) = brute_force_maxcut(&config.graph)?;
    let optimized = optimize_parameters(
        config.p,
        |params| ideal_expectation(&config.graph, params).unwrap_or(f64::NEG_INFINITY),
        &config.optimizer,
    )?;
    let ansatz = build_qaoa_ansatz(&config.graph, &optimized.params);
    let ideal = ideal_distribution(&ansatz)?;
    let ideal_optimal_probabilities = optimal.iter().map(|k| (k.clone(), ideal.probability(k))).collect();

    let programs: Vec<QuantumCircuit> = (0..config.copies)
        .map(|i| {
            let mut c = ansatz.clone();
            c.name = format!("qaoa_copy{i}");
            c
        })
        .collect();
    let merged = compile_batch(device, &programs)?;
    let alone = compile_batch(device, std::slice::from_ref(&ansatz))?;

    let hist = sample_counts(
        &merged.merged,
        &config.noise,
        config.shots,
        derive_seed(config.seed, 0, 0),
        Some(&merged.schedule),
    )?;
    let copies = split_merged_histogram(&hist, &merged.cbit_ranges)?
        .into_iter()
        .zip(merged.allocation.embeddings())
        .map(|(h, e)| summarize(e, h, &optimal))
        .collect::<Result<Vec<_>, _>>()?;
    let alone_hist = sample_counts(
        &alone.merged,
        &config.noise,
        config.shots,
        derive_seed(config.seed, 0, 1),
        Some(&alone.schedule),
    )?;
    let standalone = summarize(alone.allocation.embeddings().remove(0), alone_hist, &optimal)?;

    let standalone_cost = estimate_cost(device, &alone.merged, config.shots)?;
    let merged_cost = estimate_cost(device, &merged.merged, config.shots)?;
    Ok(QaoaReport {
        config: config.clone(),
        max_cut,
        optimal,
        optimized,
        ideal_optimal_probabilities,
        copies,
        standalone,
        cost: CostSummary::new(standalone_cost * config.copies as f64, merged_cost),
        runtime: RuntimeSummary::new(alone.schedule.duration * config.copies, merged.schedule.duration),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{builtin_device, derive_noise_model, BuiltinDevice};

    fn config(device: DeviceModel, shots: u64, seed: u64) -> QaoaConfig {
        QaoaConfig {
            noise: derive_noise_model(&device),
            device,
            graph: Graph::cycle(4),
            p: 1,
            copies: 2,
            shots,
            seed,
            optimizer: OptimizerConfig::default(),
        }
    }

    #[test]
    fn two_copies_on_trapped_ion() {
        let r = run_parallel_qaoa(&config(builtin_device(BuiltinDevice::H12Like), 100, 7)).unwrap();
        assert_eq!(r.max_cut, 4.0);
        assert_eq!(r.copies.len(), 2);
        for c in &r.copies {
            assert_eq!(c.histogram.shots, 100);
            let direct: f64 = r.optimal.iter().map(|k| c.histogram.frequency(k)).sum();
            assert!((c.success_mass - direct).abs() < 1e-12);
        }
        let e0 = &r.copies[0].embedding;
        assert!(r.copies[1].embedding.iter().all(|q| !e0.contains(q)));
    }

    #[test]
    fn savings_formulas() {
        let d = builtin_device(BuiltinDevice::H12Like);
        let r = run_parallel_qaoa(&config(d, 100, 1)).unwrap();
        assert_eq!(r.cost.savings, 1.0 - r.cost.merged / r.cost.independent);
        let single = r.cost.independent / 2.0;
        assert_eq!(r.cost.savings, 1.0 - r.cost.merged / (2.0 * single));
        assert!(r.runtime.merged_slices <= r.runtime.independent_slices);
        assert_eq!(QaoaReport::from_json(&r.to_json()).unwrap(), r);
        let csv = r.to_csv();
        assert!(csv.starts_with("run,outcome,count,shots,cut,optimal\n"));
        let rows: u64 = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(rows, 300);
    }

    #[test]
    fn capacity_is_checked() {
        let mut c = config(builtin_device(BuiltinDevice::H12Like), 10, 1);
        c.copies = 4;
        assert!(matches!(
            run_parallel_qaoa(&c),
            Err(QaoaError::Capacity { needed: 16, .. })
        ));
    }

    #[test]
    fn noiseless_copies_agree() {
        let mut c = config(builtin_device(BuiltinDevice::IbmqMumbaiLike).noiseless(), 4000, 3);
        c.noise = NoiseModel::noiseless();
        let r = run_parallel_qaoa(&c).unwrap();
        let p: f64 = r.ideal_optimal_probabilities.iter().map(|x| x.1).sum();
        let sigma = (p * (1.0 - p) / 4000.0).sqrt();
        for copy in r.copies.iter().chain([&r.standalone]) {
            assert!((copy.success_mass - p).abs() < 4.0 * sigma);
        }
    }
}
