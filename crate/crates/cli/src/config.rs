//! Run configuration: command-line flags over an optional TOML file over built-in defaults.

use std::path::{Path, PathBuf};

use aqc_core::adiabatic::{STANDARD_STEPS, STANDARD_TAU};
use aqc_core::factoring::{FactoringInstance, N_291311};
use aqc_core::noise::{DEFAULT_RELATIVE_SIGMA, DEFAULT_SAMPLES, DEFAULT_SEED};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

/// ELM weights of the built-in 291311 instance.
pub const DEFAULT_WEIGHTS: [f64; 3] = [1.2, 4.9, 4.0];
pub const DEFAULT_GRID: usize = 101;
pub const DEFAULT_OUT: &str = "aqc-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Comma-separated rows with a commented header.
    #[default]
    Rows,
    /// JSON documents.
    Structured,
}

/// Flags shared by every subcommand. Unset flags fall through to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML file with any of the keys below (kebab-case).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Semiprime to factor; anything but 291311 needs --m-bits and --n-bits.
    #[arg(long = "n", global = true, value_name = "N")]
    pub modulus: Option<u64>,
    /// Interior bit count of p.
    #[arg(long, global = true)]
    pub m_bits: Option<usize>,
    /// Interior bit count of q.
    #[arg(long, global = true)]
    pub n_bits: Option<usize>,
    /// Comma-separated clause weights, one per clause.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub weights: Option<Vec<f64>>,
    /// Number of interpolation steps L.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Dimensionless step duration.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Relative standard deviation of the rf amplitude noise.
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of points on the spectrum grid.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Omit the generation timestamp so outputs are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    n: Option<u64>,
    m_bits: Option<usize>,
    n_bits: Option<usize>,
    weights: Option<Vec<f64>>,
    steps: Option<usize>,
    tau: Option<f64>,
    sigma: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    grid: Option<usize>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    no_timestamp: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instance {
    /// The pre-reduced six-clause system for 291311.
    Builtin291311,
    /// A single global clause `p·q − N = 0`.
    Generic(FactoringInstance),
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub instance: Instance,
    /// `None` means the instance default.
    pub weights: Option<Vec<f64>>,
    pub steps: usize,
    pub tau: f64,
    pub seed: u64,
    pub samples: usize,
    pub relative_sigma: f64,
    pub grid: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub timestamp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            instance: Instance::Builtin291311,
            weights: None,
            steps: STANDARD_STEPS,
            tau: STANDARD_TAU,
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            relative_sigma: DEFAULT_RELATIVE_SIGMA,
            grid: DEFAULT_GRID,
            out: PathBuf::from(DEFAULT_OUT),
            format: OutputFormat::Rows,
            timestamp: true,
        }
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(opts: &Options) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let d = RunConfig::default();
        let modulus = opts.modulus.or(file.n);
        let m_bits = opts.m_bits.or(file.m_bits);
        let n_bits = opts.n_bits.or(file.n_bits);
        let instance = match (modulus, m_bits, n_bits) {
            (None, None, None) => Instance::Builtin291311,
            (Some(N_291311), None, None) => Instance::Builtin291311,
            (Some(n), Some(m), Some(k)) => Instance::Generic(
                FactoringInstance::new(n, m, k).map_err(|e| CliError::Config(e.to_string()))?,
            ),
            (Some(n), _, _) => {
                return Err(CliError::Config(format!(
                    "N = {n} needs both --m-bits and --n-bits"
                )))
            }
            (None, _, _) => return Err(CliError::Config("--m-bits and --n-bits need --n".into())),
        };
        let cfg = Self {
            instance,
            weights: opts.weights.clone().or(file.weights),
            steps: opts.steps.or(file.steps).unwrap_or(d.steps),
            tau: opts.tau.or(file.tau).unwrap_or(d.tau),
            seed: opts.seed.or(file.seed).unwrap_or(d.seed),
            samples: opts.samples.or(file.samples).unwrap_or(d.samples),
            relative_sigma: opts.sigma.or(file.sigma).unwrap_or(d.relative_sigma),
            grid: opts.grid.or(file.grid).unwrap_or(d.grid),
            out: opts.out.clone().or(file.out).unwrap_or(d.out),
            format: opts.format.or(file.format).unwrap_or(d.format),
            timestamp: !(opts.no_timestamp || file.no_timestamp.unwrap_or(false)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.steps == 0 {
            return bad("--steps must be positive".into());
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return bad(format!("--tau {} must be positive", self.tau));
        }
        if !(self.relative_sigma.is_finite() && self.relative_sigma >= 0.0) {
            return bad(format!(
                "--sigma {} must be non-negative",
                self.relative_sigma
            ));
        }
        if self.samples < 2 {
            return bad("--samples must be at least 2".into());
        }
        if self.grid < 2 {
            return bad("--grid must be at least 2".into());
        }
        if let Some(w) = &self.weights {
            if let Some(x) = w.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return bad(format!("weight {x} is not strictly positive"));
            }
        }
        Ok(())
    }
}
