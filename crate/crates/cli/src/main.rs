use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gsa_cli::config::RunConfig;
use gsa_cli::dispatch::{run_command, sweep_command, RunOutcome};
use gsa_cli::population::population_command;
use gsa_cli::{resolve_out_dir, CliError};

/// Variance-based global sensitivity analysis with correlated inputs.
#[derive(Parser)]
#[command(name = "gsa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured methods and write one report per (method, rho).
    Run(CommonArgs),
    /// Run the methods over the configured rho grid into one combined table.
    Sweep(CommonArgs),
    /// Simulate a virtual population and export AUC / concentration tables.
    Population(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: config, then $GSA_OUT_DIR, then ./gsa_out).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(command: Command) -> Result<RunOutcome, CliError> {
    let (args, runner): (&CommonArgs, fn(&RunConfig, &std::path::Path) -> Result<RunOutcome, CliError>) =
        match &command {
            Command::Run(a) => (a, run_command),
            Command::Sweep(a) => (a, sweep_command),
            Command::Population(a) => (a, population_command),
        };
    let mut config = RunConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if config.threads != 0 {
        // A bounded pool keeps results identical while capping parallelism.
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure thread pool: {e}")))?;
    }
    let out_dir = resolve_out_dir(args.out.clone(), config.out_dir.clone());
    runner(&config, &out_dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(outcome) => {
            for w in &outcome.written {
                println!("wrote {}", w.display());
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}
