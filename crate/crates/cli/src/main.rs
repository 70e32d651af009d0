use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use fgle_cli::{execute, parse_config, Mode, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "fgle", version, about = "Fractional Ginzburg-Landau solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML configuration; built-in defaults for the mode when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Single run: norms, diagnostics and snapshots.
    Simulate(Common),
    /// Grid-refinement study.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Use the finest reference grid (h = 0.0125, tau = 1e-4).
        #[arg(long)]
        full_reference: bool,
    },
    /// Norm decay for several gamma.
    Decay(Common),
    /// Distance to the Schrodinger limit as upsilon, kappa shrink.
    Inviscid(Common),
    /// Invariant suites over a grid of alpha.
    Verify(Common),
}

fn run(cli: Cli) -> Result<bool> {
    let (mode, common, opts) = match cli.command {
        Command::Simulate(c) => (Mode::Simulate, c, RunOptions::default()),
        Command::Convergence {
            common,
            full_reference,
        } => (Mode::Convergence, common, RunOptions { full_reference }),
        Command::Decay(c) => (Mode::Decay, c, RunOptions::default()),
        Command::Inviscid(c) => (Mode::Inviscid, c, RunOptions::default()),
        Command::Verify(c) => (Mode::Verify, c, RunOptions::default()),
    };
    let config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => RunConfig::defaults_for(mode),
    };
    let out = common
        .out
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = execute(mode, &config, &out, opts)?;
    for g in &outcome.gates {
        println!(
            "{} {}: {}",
            if g.passed { "PASS" } else { "FAIL" },
            g.name,
            g.detail
        );
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
