//! Command-line surface. The parsed [`RunConfig`] is plain data: it is
//! echoed as JSON at the start of every run and can be replayed with
//! `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirrorchain::dynamics::Temperature;
use serde::{Deserialize, Serialize};

use crate::grid::{parse_value, Grid};

#[derive(Clone, Debug, Parser, Serialize, Deserialize)]
#[command(name = "mirrorchain", version, about = "Design, reconstruct and simulate perfect-mirror XX spin chains")]
pub struct RunConfig {
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for stochastic methods.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Acceptance threshold for certification, convergence and oracle checks.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Emit debug-level diagnostics.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub verbose: bool,

    /// Replay a configuration echoed by an earlier run.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Generate a mirror-valid one-particle spectrum.
    Design(DesignArgs),
    /// Build the mirror-symmetric chain carrying a spectrum.
    Reconstruct(ReconstructArgs),
    /// Check whether a spectrum mirrors at a given time.
    Certify(CertifyArgs),
    /// Spin correlation function of a chain on a time grid.
    Correlate(CorrelateArgs),
    /// End-to-end transfer fidelity on a time grid.
    Fidelity(FidelityArgs),
    /// Compare free-fermion results against brute-force spin-space numerics.
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Linear,
    Quadratic,
    Cosine,
    /// The published 31-level integer spectrum.
    Mirror31,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct DesignArgs {
    #[arg(value_enum)]
    pub family: Family,

    /// Number of levels (= number of sites).
    #[arg(long)]
    pub levels: Option<usize>,

    /// Level spacing unit.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,

    /// Energy of the lowest level (linear and quadratic families).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub omega0: f64,

    #[arg(long, default_value_t = 1)]
    pub p: u32,

    #[arg(long, default_value_t = 1)]
    pub q: u32,

    /// Cosine amplitude A.
    #[arg(long, conflicts_with = "a0")]
    pub amplitude: Option<f64>,

    /// Cosine amplitude per squared chain length, A = N^2 a0.
    #[arg(long)]
    pub a0: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Direct,
    Annealing,
}

/// A spectrum given either as a file or inline.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct SpectrumSource {
    /// Spectrum JSON file.
    #[arg(required_unless_present = "energies")]
    pub spectrum: Option<PathBuf>,

    /// Comma-separated ascending energies instead of a file.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_value, conflicts_with = "spectrum")]
    pub energies: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub source: SpectrumSource,

    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    pub method: MethodArg,

    /// Annealing sweeps (default 5000).
    #[arg(long)]
    pub sweeps: Option<usize>,

    /// Annealing cooling factor per sweep (default 0.995).
    #[arg(long)]
    pub cooling: Option<f64>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub source: SpectrumSource,

    /// Mirror time; defaults to the file's value, or pi for inline energies.
    #[arg(long, value_parser = parse_value)]
    pub tau: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Zz,
    Xx,
}

fn parse_temperature(s: &str) -> Result<Temperature, String> {
    s.parse().map_err(|e: mirrorchain::Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse()
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct CorrelateArgs {
    /// Chain JSON file.
    pub chain: PathBuf,

    #[arg(long, value_enum)]
    pub observable: Observable,

    /// One site (autocorrelation) or two sites `j,k` for `<S_j(t) S_k(0)>`.
    #[arg(long, value_delimiter = ',', num_args = 1..=2, required = true)]
    pub sites: Vec<usize>,

    /// Temperature: a non-negative number or `inf`.
    #[arg(long, default_value = "0", value_parser = parse_temperature)]
    pub temperature: Temperature,

    /// Time grid `start:stop:points`; values may carry a `pi` suffix.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Grid,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct FidelityArgs {
    pub chain: PathBuf,

    #[arg(long, value_parser = parse_grid)]
    pub grid: Grid,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    pub chain: PathBuf,

    #[arg(long, value_delimiter = ',', default_value = "0,1,inf", value_parser = parse_temperature)]
    pub temperatures: Vec<Temperature>,

    #[arg(long, default_value = "0:5:11", value_parser = parse_grid)]
    pub grid: Grid,
}
