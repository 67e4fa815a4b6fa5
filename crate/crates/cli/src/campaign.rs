//! Campaign configuration files and the resolution of CLI inputs (device
//! names, circuit names, seed lists) into core-library values.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use multiprog::circuit::{load_benchmark, parse_qasm, QuantumCircuit};
use multiprog::device::{
    builtin_device, derive_noise_model, load_device, BuiltinDevice, DeviceModel, NoiseModel, Technology,
};
use multiprog::qaoa::Graph;
use serde::Deserialize;

/// Reported when a config field fails validation, so the message always
/// names the offending field.
#[derive(Debug)]
pub struct FieldError {
    pub field: &'static str,
    pub msg: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "field `{}`: {}", self.field, self.msg)
    }
}

impl std::error::Error for FieldError {}

pub fn field_error(field: &'static str, msg: impl Into<String>) -> anyhow::Error {
    FieldError { field, msg: msg.into() }.into()
}

/// Seeds written either as an explicit list or as a range/list string such
/// as `"1..20"` (inclusive) or `"1,5,9"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Text(String),
}

impl SeedSpec {
    pub fn resolve(&self) -> Result<Vec<u64>> {
        let seeds = match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Text(s) => parse_seeds(s).map_err(|e| field_error("seeds", e))?,
        };
        if seeds.is_empty() {
            return Err(field_error("seeds", "list is empty"));
        }
        Ok(seeds)
    }
}

pub fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let lo: u64 = a.trim().parse().map_err(|_| format!("bad seed '{a}'"))?;
            let hi: u64 = b.trim().parse().map_err(|_| format!("bad seed '{b}'"))?;
            if hi < lo {
                return Err(format!("empty range {part}"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| format!("bad seed '{part}'"))?);
        }
    }
    Ok(out)
}

/// Pairs written as `"1-2,3-4"`.
pub fn parse_pairing(text: &str) -> Result<Vec<[u32; 2]>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once('-')
                .ok_or_else(|| format!("expected 'a-b', found '{p}'"))?;
            let id = |s: &str| s.trim().parse::<u32>().map_err(|_| format!("bad benchmark id '{s}'"));
            Ok([id(a)?, id(b)?])
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseOverrides {
    pub p1q: Option<f64>,
    pub p2q: Option<f64>,
    pub p_ro: Option<f64>,
    pub crosstalk_lambda: Option<f64>,
    pub crosstalk_enabled: Option<bool>,
}

impl NoiseOverrides {
    pub fn apply(&self, mut noise: NoiseModel) -> NoiseModel {
        if let Some(v) = self.p1q {
            noise.p1q = v;
        }
        if let Some(v) = self.p2q {
            noise.p2q = v;
        }
        if let Some(v) = self.p_ro {
            noise.p_ro = v;
        }
        if let Some(v) = self.crosstalk_lambda {
            noise.crosstalk_lambda = v;
        }
        if let Some(v) = self.crosstalk_enabled {
            noise.crosstalk_enabled = v;
        }
        noise
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostOverrides {
    pub fixed_per_submission: Option<f64>,
    pub w1q: Option<f64>,
    pub w2q: Option<f64>,
    pub wmeas: Option<f64>,
    pub divisor: Option<f64>,
}

impl CostOverrides {
    pub fn apply(&self, device: &mut DeviceModel) {
        let c = &mut device.cost;
        for (slot, v) in [
            (&mut c.fixed_per_submission, self.fixed_per_submission),
            (&mut c.w1q, self.w1q),
            (&mut c.w2q, self.w2q),
            (&mut c.wmeas, self.wmeas),
            (&mut c.divisor, self.divisor),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaoaSection {
    /// Edge-list file; the 4-cycle when absent.
    pub graph: Option<PathBuf>,
    pub copies: Option<usize>,
    pub p: Option<usize>,
    pub seed: Option<u64>,
    pub max_evals: Option<usize>,
}

/// A campaign file. Every field is optional here; command-line flags fill
/// or override them, and each subcommand reports what is still missing.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub device: Option<String>,
    pub shots: Option<u64>,
    pub seeds: Option<SeedSpec>,
    pub pairing: Option<Vec<[u32; 2]>>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub noise: NoiseOverrides,
    #[serde(default)]
    pub cost: CostOverrides,
    #[serde(default)]
    pub qaoa: QaoaSection,
    /// Directory relative paths resolve against; the config file's own.
    #[serde(skip)]
    pub base: PathBuf,
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut config: CampaignConfig =
            toml::from_str(&text).map_err(|e| anyhow!("config {}: {}", path.display(), e.message()).context(e))?;
        config.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

/// A builtin name, or a TOML device file.
pub fn resolve_device(spec: &str, base: &Path) -> Result<DeviceModel> {
    if let Ok(which) = BuiltinDevice::from_str(spec) {
        return Ok(builtin_device(which));
    }
    let path = if Path::new(spec).is_absolute() {
        PathBuf::from(spec)
    } else {
        base.join(spec)
    };
    if !path.is_file() {
        let names: Vec<&str> = BuiltinDevice::ALL.iter().map(|d| d.name()).collect();
        return Err(field_error(
            "device",
            format!("'{spec}' is neither a builtin ({}) nor a device file", names.join(", ")),
        ));
    }
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    load_device(&text).map_err(|e| field_error("device", format!("{}: {e}", path.display())))
}

/// A QASM file, or a bundled benchmark id or name.
pub fn resolve_circuit(spec: &str) -> Result<QuantumCircuit> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        let mut circuit = parse_qasm(&text).with_context(|| format!("parsing {spec}"))?;
        circuit.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        return Ok(circuit);
    }
    match load_benchmark(spec) {
        Ok(b) => Ok(b.circuit),
        Err(_) => bail!("circuit '{spec}' is neither a file nor a bundled benchmark id or name"),
    }
}

pub fn resolve_graph(path: &Path) -> Result<Graph> {
    let text =
        std::fs::read_to_string(path).map_err(|e| field_error("qaoa.graph", format!("{}: {e}", path.display())))?;
    Graph::parse(&text).map_err(|e| field_error("qaoa.graph", format!("{}: {e}", path.display())))
}

/// Shots used when neither flag nor config gives any.
pub fn default_shots(device: &DeviceModel) -> u64 {
    match device.technology {
        Technology::Superconducting => 8192,
        Technology::TrappedIon => 100,
    }
}

/// Device noise with config overrides applied, then an explicit λ.
pub fn noise_for(device: &DeviceModel, overrides: &NoiseOverrides, lambda: Option<f64>) -> Result<NoiseModel> {
    let mut noise = overrides.apply(derive_noise_model(device));
    if let Some(l) = lambda {
        noise.crosstalk_lambda = l;
    }
    noise.validate().map_err(|e| match e {
        multiprog::device::DeviceError::Invalid { field, msg } => anyhow!("field `noise.{field}`: {msg}"),
        other => anyhow!(other),
    })?;
    Ok(noise)
}

pub fn check_shots(shots: u64) -> Result<u64> {
    if shots == 0 {
        return Err(field_error("shots", "must be at least 1"));
    }
    Ok(shots)
}

/// Output directory: flag, then config, then `MULTIPROG_OUT`, then
/// `reports`.
pub fn out_dir(flag: Option<PathBuf>, config: &CampaignConfig) -> PathBuf {
    flag.or_else(|| config.out.as_ref().map(|p| config.path(p)))
        .or_else(|| std::env::var_os("MULTIPROG_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"))
}
