//! `levyflow` command-line driver: configuration, subcommands and output
//! formats around `levyflow-core`.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use levyflow_core::ensemble::EnsembleError;
use levyflow_core::macro_sim::MacroError;
use levyflow_core::micro_sim::MicroError;
use thiserror::Error;

pub use config::Config;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("convergence check failed: {0}")]
    Convergence(String),
    #[error("solver diverged: {0}")]
    Diverged(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Eval(_) => 3,
            CliError::Convergence(_) => 4,
            CliError::Diverged(_) => 5,
            CliError::Invariant(_) => 6,
        }
    }
}

impl From<MacroError> for CliError {
    fn from(e: MacroError) -> Self {
        let msg = e.to_string();
        match e {
            MacroError::SolverDiverged { .. } => CliError::Diverged(msg),
            MacroError::InvariantViolated { .. } | MacroError::ExponentOutOfRange(_) => CliError::Invariant(msg),
            MacroError::ConfigInvalid(_) | MacroError::Driver(_) | MacroError::Frac(_) => CliError::Config(msg),
        }
    }
}

impl From<MicroError> for CliError {
    fn from(e: MicroError) -> Self {
        let msg = e.to_string();
        match e {
            MicroError::NoAliveParticles => CliError::Invariant(msg),
            MicroError::ConfigInvalid(_) | MicroError::Driver(_) => CliError::Config(msg),
        }
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        let msg = e.to_string();
        let inner = match e {
            EnsembleError::ConfigInvalid(_) => return CliError::Config(msg),
            EnsembleError::Macro { source, .. } => CliError::from(source),
            EnsembleError::Micro { source, .. } => CliError::from(source),
        };
        match inner {
            CliError::Config(_) => CliError::Config(msg),
            CliError::Diverged(_) => CliError::Diverged(msg),
            _ => CliError::Invariant(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "levyflow", version, about = "Levy-driven micro and macro invasion simulations")]
pub struct Cli {
    /// TOML configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for ensembles, 0 for all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory; LEVYFLOW_OUT takes precedence.
    #[arg(long, global = true, default_value = "levyflow-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a Levy symbol on a line of frequencies.
    Symbol {
        #[arg(long)]
        name: Option<String>,
    },
    /// Convergence table of the discrete fractional Laplacian.
    Fracheck,
    /// Single particle-model run.
    Micro {
        /// gaussian, switching or cauchy_modulated
        #[arg(long)]
        noise: Option<String>,
    },
    /// Single macroscopic run.
    Macro {
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Monte Carlo ensemble of the micro or macro model.
    Ensemble {
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        /// macro or micro
        #[arg(long)]
        kind: Option<String>,
    },
    /// Grayscale images and contour segments of saved snapshots.
    Report {
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("levyflow: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    let out = match std::env::var_os("LEVYFLOW_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => cli.out,
    };
    match cli.command {
        Command::Symbol { name } => {
            if let Some(n) = name {
                cfg.symbol.name = n;
            }
            commands::cmd_symbol(&cfg, &out)?;
        }
        Command::Fracheck => {
            commands::cmd_fracheck(&cfg, &out)?;
        }
        Command::Micro { noise } => {
            if let Some(n) = noise {
                cfg.micro.noise = n;
            }
            commands::cmd_micro(&cfg, &out)?;
        }
        Command::Macro { steps } => {
            if let Some(s) = steps {
                cfg.macro_model.truncate(s);
            }
            commands::cmd_macro(&cfg, &out)?;
        }
        Command::Ensemble { samples, steps, kind } => {
            if let Some(m) = samples {
                cfg.ensemble.m = m;
            }
            if let Some(s) = steps {
                cfg.macro_model.truncate(s);
                cfg.micro.n = s;
            }
            if let Some(k) = kind {
                cfg.ensemble.kind = match k.as_str() {
                    "macro" => config::EnsembleKindName::Macro,
                    "micro" => config::EnsembleKindName::Micro,
                    other => return Err(CliError::Config(format!("unknown ensemble kind `{other}`"))),
                };
            }
            commands::cmd_ensemble(&cfg, &out)?;
        }
        Command::Report { input } => {
            if let Some(dir) = input {
                cfg.report.input = dir.to_string_lossy().into_owned();
            }
            commands::cmd_report(&cfg, &out)?;
        }
    }
    Ok(())
}
