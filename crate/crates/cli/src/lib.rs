//! `bgc`: validity checks, channel norms, convergence sweeps, scaling fits
//! and oracle runs driven by a TOML config.
//!
//! Exit codes: 0 success, 1 domain or validation failure, 2 parse or IO
//! failure.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{ChannelSpec, Config, StateSpec, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Domain(#[from] bgc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Validation(_) | CliError::Domain(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bgc",
    version,
    about = "Schatten norms of Gaussian states and p->p norms of Gaussian channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate every channel (CP test), state (uncertainty test) and sweep.
    Check { config: PathBuf },
    /// Print det K and |det K|^{1/p-1} for each channel.
    Norm {
        config: PathBuf,
        /// Real p >= 1 or `inf`.
        #[arg(long)]
        p: f64,
        #[arg(long)]
        channel: Option<String>,
    },
    /// Ratio Tr Phi[rho_b]^p / Tr rho_b^p along a Gibbs sweep, as CSV.
    Converge {
        config: PathBuf,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        channel: Option<String>,
    },
    /// Log-log exponent of ||rho_b||_p, and of the q->p ratio when --q is set.
    Scaling {
        config: PathBuf,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        channel: Option<String>,
    },
    /// Closed forms against the truncated Fock-space oracle (one mode).
    Oracle {
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        /// Mean photon number of the thermal input.
        #[arg(long = "N", default_value_t = 1.0)]
        n: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long = "n-max")]
        n_max: Option<usize>,
    },
}

/// Flags that override the `[sweep]` table.
#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "beta-start")]
    pub beta_start: Option<f64>,
    #[arg(long = "beta-stop")]
    pub beta_stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

/// Whether every check in a command passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Check { config } => commands::check(&Config::load(&config)?, out),
        Command::Norm { config, p, channel } => {
            commands::norm(&Config::load(&config)?, p, channel.as_deref(), out, err)
        }
        Command::Converge {
            config,
            sweep,
            out: path,
            channel,
        } => commands::converge(
            &Config::load(&config)?,
            &sweep,
            path.as_deref(),
            channel.as_deref(),
            out,
        ),
        Command::Scaling {
            config,
            sweep,
            q,
            channel,
        } => commands::scaling(&Config::load(&config)?, &sweep, q, channel.as_deref(), out),
        Command::Oracle { tau, n, p, n_max } => commands::oracle(tau, n, p, n_max, out),
    }
}
