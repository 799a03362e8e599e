//! `rrc` — command-line front end for root-Ricci curvature statistics and
//! candle comparisons.
//!
//! ```text
//! rrc classify|candle|compare|extremal|sweep --config <path> [--seed N] [--steps N] [--out <path>]
//! ```
//!
//! Exit codes: 0 success, 1 config error, 2 precondition/window failure,
//! 3 inequality violation.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Failure, Report};
use config::{Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "rrc",
    version,
    about = "Root-Ricci curvature and candle comparison toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute √Ric, the class boundary κ*, and class membership margins.
    Classify(RunArgs),
    /// Emit candle plot data (r, s, log_deriv, first_conjugate).
    Candle(RunArgs),
    /// Check the LCD/Candle/Ball comparison conditions against the κ model.
    Compare(RunArgs),
    /// Solve the extremal problem and report sharpness diagnostics.
    Extremal(RunArgs),
    /// Fan one command out across consecutive seeds, gathered in seed order.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config integration step count.
    #[arg(long)]
    steps: Option<usize>,
    /// Override the config output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    type Action = fn(&RunConfig) -> Result<Report, Failure>;
    let (args, action): (&RunArgs, Action) = match &cli.command {
        Command::Classify(a) => (a, commands::classify),
        Command::Candle(a) => (a, commands::candle),
        Command::Compare(a) => (a, commands::compare),
        Command::Extremal(a) => (a, commands::extremal),
        Command::Sweep(a) => (a, commands::sweep),
    };

    let config = match load_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };

    match action(&config) {
        Ok(report) => match render(&report, &config) {
            Ok(()) => ExitCode::from(report.exit),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit())
        }
    }
}

fn load_config(args: &RunArgs) -> anyhow::Result<RunConfig> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(steps) = args.steps {
        config.steps = steps;
    }
    if let Some(out) = &args.out {
        config.output = Some(out.clone());
    }
    Ok(config)
}

fn render(report: &Report, config: &RunConfig) -> anyhow::Result<()> {
    let mut text = String::new();
    match config.format {
        Format::Csv => {
            text.push_str(&report.header.join(","));
            text.push('\n');
            for row in &report.rows {
                text.push_str(&row.join(","));
                text.push('\n');
            }
        }
        Format::Human => {
            for row in &report.rows {
                for (name, value) in report.header.iter().zip(row) {
                    text.push_str(&format!("{name:>16}  {value}\n"));
                }
                text.push('\n');
            }
        }
    }
    match &config.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
