//! Command-line driver: config loading, run manifests and the four
//! subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
mod plot;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use tdqec::engines::EngineKind;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::OutputDir;

pub const DEFAULT_OUT_DIR: &str = "tdqec-out";

#[derive(Debug, Parser)]
#[command(name = "tdqec", version, about = "Dissipative error correction of bit-flip repetition codes")]
pub struct Cli {
    /// TOML experiment config; every section defaults to the reference experiment.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Master seed for stochastic engines (overrides the config).
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Output directory (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "TDQEC_THREADS", value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infidelity curves for each size, error rate and scheme.
    Simulate {
        #[arg(long, value_parser = parse_engine)]
        engine: Option<EngineKind>,
    },
    /// Fitted logical error rates, threshold, Lambda and extrapolation.
    Sweep,
    /// Engineered ion rates per coset weight.
    Rates,
    /// Knill-Laflamme, projector and scheme-equivalence checks.
    Verify,
    /// Print the effective config as TOML.
    Config,
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    s.parse().map_err(|e: tdqec::Error| e.to_string())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Simulate { .. } => "simulate",
            Self::Sweep => "sweep",
            Self::Rates => "rates",
            Self::Verify => "verify",
            Self::Config => "config",
        }
    }
}

/// Config file plus command-line overrides.
pub fn effective_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Command::Simulate { engine: Some(e) } = cli.command {
        cfg.simulate.engine = e;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let cfg = effective_config(&cli)?;
    if let Command::Config = cli.command {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let dir = cli.out.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| DEFAULT_OUT_DIR.into());
    let mut out = OutputDir::prepare(&dir, cli.command.name())?;
    match cli.command {
        Command::Simulate { .. } => {
            commands::cmd_simulate(&cfg, &mut out)?;
            let engine = cfg.simulate.engine;
            let stochastic = matches!(engine, EngineKind::Mcwf | EngineKind::Gillespie);
            out.finish(&cfg, if stochastic { vec![cfg.seed] } else { Vec::new() }, Some(engine.name().into()))?;
        }
        Command::Sweep => {
            let analyses = commands::cmd_sweep(&cfg, &mut out)?;
            out.finish(&cfg, Vec::new(), Some(EngineKind::Chain.name().into()))?;
            for a in analyses {
                let th = a.threshold.as_ref().map(|t| format!("{:.4}", t.median)).unwrap_or_else(|e| e.clone());
                let star = a.lambda.as_ref().map(|l| format!("{:.4}", l.gamma_e_star)).unwrap_or_else(|e| e.clone());
                let n = a.extrapolation.as_ref().map(|x| x.n.to_string()).unwrap_or_else(|e| e.clone());
                println!("{}: threshold {th}, gamma_e* {star}, qubits for target {n}", a.scheme);
            }
        }
        Command::Rates => {
            commands::cmd_rates(&cfg, &mut out)?;
            out.finish(&cfg, Vec::new(), None)?;
        }
        Command::Verify => {
            let checks = commands::cmd_verify(&cfg, &mut out)?;
            out.finish(&cfg, Vec::new(), None)?;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            if !failed.is_empty() {
                return Err(CliError::Verification(failed.join(", ")));
            }
        }
        Command::Config => unreachable!("handled above"),
    }
    Ok(())
}
