mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use commands::Overrides;
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Ground states of the coupled Choquard system.
#[derive(Parser)]
#[command(name = "choquard", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for all output files (overrides the config).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Seed for random inputs (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads. For sweeps, values above 1 also solve points concurrently.
    #[arg(long, global = true, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
    parallel: Option<u64>,
    /// Suppress progress and tables on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a ground state and write fields, result and history.
    Solve { config: PathBuf },
    /// Run the verification suite on a configuration.
    Verify { config: PathBuf },
    /// Solve a family of configurations along one parameter axis.
    Sweep { sweep: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ov = Overrides {
        output_dir: cli.output_dir,
        seed: cli.seed,
        parallel: cli.parallel.map(|k| k as usize),
        quiet: cli.quiet,
    };
    let work = || match &cli.command {
        Command::Solve { config } => commands::solve(config, &ov),
        Command::Verify { config } => commands::verify(config, &ov),
        Command::Sweep { sweep } => commands::sweep(sweep, &ov),
    };
    match ov.parallel {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
