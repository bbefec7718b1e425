//! Run configuration: TOML with dotted-key overrides.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use fracvar::fields::smooth_bump;
use fracvar::spaces::ComplementarySpec;
use fracvar::varsolve::relaxation_benchmark;
use fracvar::{Backend, DecayClass, FractionalParams, GridSpec, Mask, SampledField};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ops,
    Verify,
    Envelope,
    Minimize,
    Relax,
    Lsc,
    Presets,
}

/// Configuration used when no file is given.
pub const DEFAULT_CONFIG: &str = r#"
seed = 0
output_dir = "fracvar-out"
integrand = "pinched-nonconvex-1d"

[grid]
dim = 1
kind = "truncated-box"
half_extent = 2.0
points = 512

[params]
alpha = 0.5
p = 2.0
"#;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub grid: GridConfig,
    pub params: ParamsConfig,
    #[serde(default)]
    pub backend: BackendChoice,
    #[serde(default)]
    pub complementary: ComplementaryConfig,
    #[serde(default = "default_integrand")]
    pub integrand: String,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub envelope: EnvelopeConfig,
    #[serde(default)]
    pub relax: RelaxConfig,
    #[serde(default)]
    pub ops: OpsConfig,
}

fn default_integrand() -> String {
    "quadratic".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKindName {
    TruncatedBox,
    PeriodicCell,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "one")]
    pub dim: usize,
    #[serde(default = "box_kind")]
    pub kind: GridKindName,
    #[serde(default = "two")]
    pub half_extent: f64,
    pub points: usize,
}

fn one() -> usize {
    1
}
fn two() -> f64 {
    2.0
}
fn box_kind() -> GridKindName {
    GridKindName::TruncatedBox
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha: f64,
    #[serde(default = "p_default")]
    pub p: f64,
}

fn p_default() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendChoice {
    #[default]
    Spectral,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Datum {
    Zero,
    Bump,
    RelaxationBenchmark,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComplementaryConfig {
    pub omega_lo: Vec<f64>,
    pub omega_hi: Vec<f64>,
    pub margin: usize,
    /// Defaults to the relaxation benchmark for `relax` and `lsc`, a bump
    /// otherwise.
    pub datum: Option<Datum>,
    pub datum_center: Option<Vec<f64>>,
    pub datum_radius: f64,
}

impl Default for ComplementaryConfig {
    fn default() -> Self {
        ComplementaryConfig {
            omega_lo: vec![0.0],
            omega_hi: vec![1.0],
            margin: 4,
            datum: None,
            datum_center: None,
            datum_radius: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub spectral: f64,
    pub quadrature: f64,
    pub composition: f64,
    pub cutoff_exponent: f64,
    pub minimize: f64,
    pub max_iterations: usize,
    pub witness: f64,
    pub lsc: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            spectral: 1e-10,
            quadrature: 1e-3,
            composition: 1e-6,
            cutoff_exponent: 0.1,
            minimize: 1e-6,
            max_iterations: 5000,
            witness: 1e-6,
            lsc: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvelopeConfig {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub sweep: bool,
    pub sweep_lo: f64,
    pub sweep_hi: f64,
    pub sweep_samples: usize,
    pub search_points: usize,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            lo: -5.0,
            hi: 5.0,
            samples: 10001,
            sweep: true,
            sweep_lo: -2.0,
            sweep_hi: 2.0,
            sweep_samples: 41,
            search_points: 256,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelaxConfig {
    pub ks: Vec<usize>,
    pub cutoff_inner: f64,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig { ks: vec![4, 8, 16, 32], cutoff_inner: 0.8 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpsConfig {
    pub field: String,
    /// Order s of the fractional Laplacian; defaults to α/2.
    pub laplacian_order: Option<f64>,
}

impl Default for OpsConfig {
    fn default() -> Self {
        OpsConfig { field: "gaussian".into(), laplacian_order: None }
    }
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> CliResult<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::Config(format!("empty override key '{key}'")))?;
    let mut node = table;
    for part in parts {
        let entry = node.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override '{key}': '{part}' is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Parses `text`, applies `key=value` overrides and validates the result.
pub fn load(text: &str, overrides: &[String]) -> CliResult<RunConfig> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override '{item}' is not of the form key=value")))?;
        set_path(&mut table, key.trim(), parse_value(raw.trim()))?;
    }
    let config: RunConfig = table.try_into().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_file(path: Option<&Path>, overrides: &[String]) -> CliResult<RunConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            load(&text, overrides)
        }
        None => load(DEFAULT_CONFIG, overrides),
    }
}

impl RunConfig {
    fn validate(&self) -> CliResult<()> {
        let dim = self.grid.dim;
        let c = &self.complementary;
        if c.omega_lo.len() != dim || c.omega_hi.len() != dim {
            return Err(CliError::Config(format!("complementary.omega_lo/omega_hi need {dim} entries")));
        }
        if self.relax.ks.is_empty() || self.relax.ks.contains(&0) {
            return Err(CliError::Config("relax.ks must list positive oscillation counts".into()));
        }
        self.grid()?;
        self.params()?;
        Ok(())
    }

    pub fn grid(&self) -> CliResult<GridSpec> {
        let g = &self.grid;
        let spec = match g.kind {
            GridKindName::TruncatedBox => GridSpec::truncated(g.dim, g.half_extent, g.points),
            GridKindName::PeriodicCell => GridSpec::periodic(g.dim, g.points),
        };
        spec.map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn params(&self) -> CliResult<FractionalParams> {
        FractionalParams::new(self.grid.dim, self.params.alpha, self.params.p).map_err(|e| CliError::Config(format!("params: {e}")))
    }

    pub fn backend(&self, grid: &GridSpec) -> Backend {
        match self.backend {
            BackendChoice::Spectral => Backend::spectral_for(grid),
            BackendChoice::Quadrature => Backend::quadrature(),
        }
    }

    pub fn datum(&self, command: Command, grid: GridSpec, params: &FractionalParams) -> CliResult<SampledField> {
        let c = &self.complementary;
        let default = match command {
            Command::Relax | Command::Lsc => Datum::RelaxationBenchmark,
            _ => Datum::Bump,
        };
        Ok(match c.datum.unwrap_or(default) {
            Datum::Zero => SampledField::zeros(grid, 1, DecayClass::CompactSupport),
            Datum::Bump => {
                let center = c.datum_center.clone().unwrap_or_else(|| {
                    c.omega_lo.iter().zip(&c.omega_hi).map(|(a, b)| 0.5 * (a + b)).collect()
                });
                smooth_bump(grid, &center, c.datum_radius)
            }
            Datum::RelaxationBenchmark => relaxation_benchmark(grid, params)
                .map_err(|e| CliError::Config(format!("relaxation benchmark datum: {e}")))?,
        })
    }

    pub fn spec(&self, command: Command, grid: GridSpec, params: &FractionalParams) -> CliResult<ComplementarySpec> {
        let c = &self.complementary;
        let omega = Mask::open_box(grid, &c.omega_lo, &c.omega_hi);
        let g = self.datum(command, grid, params)?;
        ComplementarySpec::with_margin(omega, g, c.margin).map_err(|e| CliError::Config(format!("complementary: {e}")))
    }
}
