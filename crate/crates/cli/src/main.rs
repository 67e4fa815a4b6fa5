//! `multiprog`: circuit statistics, compilation, simulation and seeded
//! benchmark campaigns from the command line.

mod campaign;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use multiprog::circuit::{circuit_stats, emit_qasm, rebase_to_basis, Basis};
use multiprog::compiler::compile_batch;
use multiprog::device::{estimate_cost, NoiseModel};
use multiprog::metrics::{default_pairing, run_benchmark_suite, SuiteConfig};
use multiprog::qaoa::{run_parallel_qaoa, Graph, OptimizerConfig, QaoaConfig};
use multiprog::sim::sample_counts;

use campaign::{
    check_shots, default_shots, field_error, noise_for, out_dir, parse_pairing, resolve_circuit, resolve_device,
    resolve_graph, CampaignConfig, SeedSpec,
};

#[derive(Parser)]
#[command(
    name = "multiprog",
    version,
    about = "Multi-programming compiler and noisy simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Superconducting,
    TrappedIon,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Superconducting => Basis::Superconducting,
            BasisArg::TrappedIon => Basis::TrappedIon,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print gate counts and depth of a circuit.
    Stats {
        /// QASM file, or bundled benchmark id or name.
        circuit: String,
        /// Rebase before counting.
        #[arg(long, value_enum)]
        basis: Option<BasisArg>,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite a circuit into a native gate set and emit QASM.
    Rebase {
        circuit: String,
        #[arg(long, value_enum)]
        basis: BasisArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Place circuits on disjoint device partitions and print the allocation.
    Allocate {
        #[arg(long)]
        device: String,
        #[arg(required = true)]
        circuits: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a circuit, noiselessly or compiled onto a device with noise.
    Simulate {
        circuit: String,
        #[arg(long)]
        device: Option<String>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: u64,
        /// Compile onto the device but sample without noise.
        #[arg(long)]
        noiseless: bool,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Standalone vs simultaneous PST campaign over benchmark pairs.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        device: Option<String>,
        #[arg(long)]
        shots: Option<u64>,
        /// `1..20` (inclusive) or `1,2,3`.
        #[arg(long)]
        seeds: Option<String>,
        /// `1-2,3-4`.
        #[arg(long)]
        pairing: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identical MaxCut QAOA instances run side by side.
    Qaoa {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        device: Option<String>,
        /// Edge-list file; the 4-cycle when omitted.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        copies: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_evals: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the cost of running circuits separately and merged.
    Cost {
        #[arg(long)]
        device: String,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(required = true)]
        circuits: Vec<String>,
    },
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing into {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<CampaignConfig> {
    path.map(CampaignConfig::load)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats { circuit, basis, json } => {
            let mut c = resolve_circuit(&circuit)?;
            if let Some(b) = basis {
                c = rebase_to_basis(&c, b.into());
            }
            let s = circuit_stats(&c);
            if json {
                println!("{}", serde_json::to_string_pretty(&s)?);
            } else {
                println!(
                    "{} qubits={} cbits={} gates={} cx={} depth={}",
                    c.name, s.n_qubits, c.n_cbits, s.total_gates, s.cx_count, s.depth
                );
            }
        }
        Command::Rebase { circuit, basis, out } => {
            let c = rebase_to_basis(&resolve_circuit(&circuit)?, basis.into());
            emit(out.as_deref(), &emit_qasm(&c))?;
        }
        Command::Allocate { device, circuits, out } => {
            let device = resolve_device(&device, Path::new(""))?;
            let programs = circuits
                .iter()
                .map(|c| resolve_circuit(c))
                .collect::<Result<Vec<_>>>()?;
            let batch = compile_batch(&device, &programs)?;
            emit(
                out.as_deref(),
                &(serde_json::to_string_pretty(&batch.allocation)? + "\n"),
            )?;
        }
        Command::Simulate {
            circuit,
            device,
            shots,
            seed,
            noiseless,
            lambda,
            out,
        } => {
            let c = resolve_circuit(&circuit)?;
            let hist = match device {
                Some(d) => {
                    let device = resolve_device(&d, Path::new(""))?;
                    let shots = check_shots(shots.unwrap_or_else(|| default_shots(&device)))?;
                    let noise = if noiseless {
                        NoiseModel::noiseless()
                    } else {
                        noise_for(&device, &Default::default(), lambda)?
                    };
                    let batch = compile_batch(&device, std::slice::from_ref(&c))?;
                    sample_counts(&batch.merged, &noise, shots, seed, Some(&batch.schedule))?
                }
                None => sample_counts(
                    &c,
                    &NoiseModel::noiseless(),
                    check_shots(shots.unwrap_or(1024))?,
                    seed,
                    None,
                )?,
            };
            emit(out.as_deref(), &(serde_json::to_string_pretty(&hist)? + "\n"))?;
        }
        Command::Suite {
            config,
            device,
            shots,
            seeds,
            pairing,
            lambda,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let device_spec = device
                .map(|d| (d, PathBuf::new()))
                .or_else(|| cfg.device.clone().map(|d| (d, cfg.base.clone())))
                .ok_or_else(|| field_error("device", "required"))?;
            let mut device = resolve_device(&device_spec.0, &device_spec.1)?;
            cfg.cost.apply(&mut device);
            device.cost.validate()?;
            let seeds = match seeds {
                Some(s) => SeedSpec::Text(s).resolve()?,
                None => cfg
                    .seeds
                    .as_ref()
                    .ok_or_else(|| field_error("seeds", "required; campaigns never seed from the clock"))?
                    .resolve()?,
            };
            let pairing = match pairing {
                Some(p) => parse_pairing(&p).map_err(|e| field_error("pairing", e))?,
                None => cfg.pairing.clone().unwrap_or_else(default_pairing),
            };
            let suite = SuiteConfig {
                noise: noise_for(&device, &cfg.noise, lambda)?,
                shots: check_shots(shots.or(cfg.shots).unwrap_or_else(|| default_shots(&device)))?,
                device,
                pairing,
                seeds,
            };
            let dir = out_dir(out, &cfg);
            let report = run_benchmark_suite(&suite)?;
            write_atomic(&dir.join("suite_report.json"), &report.to_json())?;
            write_atomic(&dir.join("suite_results.csv"), &report.to_csv())?;
            let a = &report.aggregate;
            println!(
                "{} pairs x {} seeds: standalone {:.4} simultaneous {:.4} drop {:+.2} pp (sigma {:.2}) cost savings {:.2}% runtime savings {:.2}%",
                report.pairs.len(),
                report.config.seeds.len(),
                a.mean_standalone_pst,
                a.mean_simultaneous_pst,
                100.0 * a.mean_drop,
                100.0 * a.drop_sigma,
                100.0 * a.cost.savings,
                100.0 * a.runtime.savings,
            );
            println!("wrote {}", dir.display());
        }
        Command::Qaoa {
            config,
            device,
            graph,
            copies,
            p,
            shots,
            seed,
            max_evals,
            lambda,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let device_spec = device
                .map(|d| (d, PathBuf::new()))
                .or_else(|| cfg.device.clone().map(|d| (d, cfg.base.clone())))
                .ok_or_else(|| field_error("device", "required"))?;
            let mut device = resolve_device(&device_spec.0, &device_spec.1)?;
            cfg.cost.apply(&mut device);
            device.cost.validate()?;
            let graph = match graph.or_else(|| cfg.qaoa.graph.as_ref().map(|g| cfg.path(g))) {
                Some(path) => resolve_graph(&path)?,
                None => Graph::cycle(4),
            };
            let seed = seed
                .or(cfg.qaoa.seed)
                .ok_or_else(|| field_error("qaoa.seed", "required; campaigns never seed from the clock"))?;
            let mut optimizer = OptimizerConfig::default();
            if let Some(m) = max_evals.or(cfg.qaoa.max_evals) {
                optimizer.max_evals = m;
            }
            let qaoa = QaoaConfig {
                noise: noise_for(&device, &cfg.noise, lambda)?,
                shots: check_shots(shots.or(cfg.shots).unwrap_or_else(|| default_shots(&device)))?,
                device,
                graph,
                p: p.or(cfg.qaoa.p).unwrap_or(1),
                copies: copies.or(cfg.qaoa.copies).unwrap_or(2),
                seed,
                optimizer,
            };
            let dir = out_dir(out, &cfg);
            let report = run_parallel_qaoa(&qaoa)?;
            write_atomic(&dir.join("qaoa_report.json"), &report.to_json())?;
            write_atomic(&dir.join("qaoa_results.csv"), &report.to_csv())?;
            println!(
                "max cut {} optimal {:?} expectation {:.4}",
                report.max_cut, report.optimal, report.optimized.value
            );
            for (k, c) in report.copies.iter().enumerate() {
                println!("copy{k}: mode {} success {:.3}", c.modal_outcome, c.success_mass);
            }
            println!(
                "standalone: mode {} success {:.3}",
                report.standalone.modal_outcome, report.standalone.success_mass
            );
            println!("wrote {}", dir.display());
        }
        Command::Cost {
            device,
            shots,
            circuits,
        } => {
            let device = resolve_device(&device, Path::new(""))?;
            let shots = check_shots(shots.unwrap_or_else(|| default_shots(&device)))?;
            let programs = circuits
                .iter()
                .map(|c| resolve_circuit(c))
                .collect::<Result<Vec<_>>>()?;
            let mut independent = 0.0;
            for p in &programs {
                let alone = compile_batch(&device, std::slice::from_ref(p))?;
                let cost = estimate_cost(&device, &alone.merged, shots)?;
                independent += cost;
                println!("{} {:.4}", p.name, cost);
            }
            let merged = compile_batch(&device, &programs)?;
            let cost = estimate_cost(&device, &merged.merged, shots)?;
            println!("merged {cost:.4}");
            println!("savings {:.4}", 1.0 - cost / independent);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
