//! Command-line front end: compiles the factoring instance, runs the passage,
//! emits the pulse program and noise reports, and writes golden-file friendly
//! output.

pub mod commands;
pub mod config;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{build_problem, decode_basis, oracle_check, OracleReport, Problem};
pub use config::{Instance, Options, OutputFormat, RunConfig};

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_UNSATISFIABLE: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Unsatisfiable(_) => EXIT_UNSATISFIABLE,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

impl From<aqc_core::Error> for CliError {
    fn from(e: aqc_core::Error) -> Self {
        use aqc_core::Error as E;
        match e {
            E::Unsatisfiable(_) => CliError::Unsatisfiable(e.to_string()),
            E::DecodeVerification { .. } => CliError::Verification(e.to_string()),
            E::ResourceLimit { .. }
            | E::EnumerationLimit { .. }
            | E::InvalidArgument(_)
            | E::ZeroInterpolation { .. } => CliError::Config(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "aqc",
    version,
    about = "Adiabatic factoring compiler and simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseMode {
    Intrinsic,
    Trotter,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile the instance to a penalty Hamiltonian and list its ground assignments.
    Compile,
    /// Run the piecewise-constant passage and decode the final state into factors.
    Run,
    /// Emit the rf pulse program and check it against the dimensionless steps.
    Pulses,
    /// Eigenvalues of H(s) over a uniform grid.
    Spectrum,
    /// Monte Carlo fidelity statistics under rf amplitude noise.
    Noise {
        #[arg(long, value_enum, default_value_t = NoiseMode::Both)]
        mode: NoiseMode,
    },
    /// Noiseless first-order split passage with fidelity after each factor.
    Trotter,
    /// Cross-check compiled diagonal minima against the polynomial brute force.
    Oracle,
}

/// What a command reported and wrote. `failure` is set when outputs were
/// written but a verification step did not pass.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub summary: Vec<(String, String)>,
    pub files: Vec<PathBuf>,
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for f in &self.files {
            out.push_str(&format!("wrote: {}\n", f.display()));
        }
        out
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = RunConfig::resolve(&cli.options)?;
    match cli.command {
        Command::Compile => commands::compile(&cfg),
        Command::Run => commands::run(&cfg),
        Command::Pulses => commands::pulses(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Noise { mode } => commands::noise(&cfg, mode),
        Command::Trotter => commands::trotter(&cfg),
        Command::Oracle => commands::oracle(&cfg),
    }
}
