use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

mod commands;
mod config;
mod docs;

use commands::ExperimentArgs;

/// Multi-output teleportation experiments on a simulated 7-qubit device.
#[derive(Debug, Parser)]
#[command(name = "teleport", version)]
struct Cli {
    /// Worker threads for sampling and tomography (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a teleportation scheme, ideally and on the device model.
    Run(ExperimentArgs),
    /// State tomography of the receivers' two-qubit state.
    Tomography {
        #[command(flatten)]
        args: ExperimentArgs,
        /// Reconstruct from exact expectation values instead of samples.
        #[arg(long)]
        exact: bool,
    },
    /// Mean and sample standard deviation of a list of fidelities.
    Stats {
        /// File of numbers; `#` starts a comment.
        values: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Route a circuit onto a coupling graph.
    Route {
        circuit: PathBuf,
        /// Edge list; defaults to the 7-qubit H-shaped device.
        #[arg(long, value_name = "PATH")]
        graph: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Compare the two-Bell scheme with the five-qubit cluster baseline.
    Compare(ExperimentArgs),
}

fn emit<T: Serialize>(doc: &T, out: Option<&PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        anyhow::ensure!(n > 0, "--workers must be at least 1");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Run(a) => emit(&commands::cmd_run(&a)?, a.out.as_ref()),
        Command::Tomography { args, exact } => emit(&commands::cmd_tomography(&args, exact)?, args.out.as_ref()),
        Command::Stats { values, out } => emit(&commands::cmd_stats(&values)?, out.as_ref()),
        Command::Route { circuit, graph, out } => emit(&commands::cmd_route(&circuit, graph.as_deref())?, out.as_ref()),
        Command::Compare(a) => emit(&commands::cmd_compare(&a)?, a.out.as_ref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
