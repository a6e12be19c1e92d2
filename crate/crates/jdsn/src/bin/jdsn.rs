//! Thin command-line wrapper over [`jdsn::cli`].
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for
//! numerical/study errors. Errors are printed as one JSON object on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "jdsn",
    version,
    about = "Small-noise jump-diffusion simulation and threshold-filtered estimation studies"
)]
struct Cli {
    /// JSON study config, or a manifest.json from a previous run.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's out_dir).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for the replication loop (default: JDSN_WORKERS, then
    /// all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Progress notes on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate observed paths and write path/truth CSV files.
    Simulate,
    /// Simulate one path and estimate the parameters from it.
    Estimate,
    /// Compute the limit information matrix at the configured truth.
    Fisher,
    /// Run the Monte Carlo study (single regime or ladder).
    Mc,
    /// Check threshold-exponent admissibility and ladder rate conditions.
    CheckRho,
}

fn run(cli: &Cli) -> jdsn::Result<()> {
    jdsn::cli::configure_workers(cli.workers)?;
    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| jdsn::Error::Config("--config PATH is required".into()))?;
    let mut cfg = jdsn::cli::load_config(config_path)?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    let out_dir = jdsn::cli::resolve_out_dir(cli.out.as_deref(), &cfg);
    match cli.command {
        Command::Simulate => jdsn::cli::cmd_simulate(&cfg, &out_dir, cli.verbose),
        Command::Estimate => jdsn::cli::cmd_estimate(&cfg, &out_dir, cli.verbose),
        Command::Fisher => jdsn::cli::cmd_fisher(&cfg, &out_dir, cli.verbose),
        Command::Mc => jdsn::cli::cmd_mc(&cfg, &out_dir, cli.verbose),
        Command::CheckRho => jdsn::cli::cmd_check_rho(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", jdsn::cli::error_json(&err));
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
