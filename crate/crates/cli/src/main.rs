//! `psmdi`: key rates, sweeps, optimizers and figure tables for
//! photon-subtracted CV-MDI-QKD.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigArgs;
use crate::error::CliError;
use crate::output::{write_table, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "psmdi", version, about = "Photon-subtracted CV-MDI-QKD key-rate calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to PATH instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Key rate and intermediate quantities for one configuration
    Rate {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate selected outputs over a one- or two-axis grid
    Sweep(commands::SweepArgs),
    /// Regenerate a figure table (fig3 … fig9)
    Figure(commands::FigureArgs),
    /// Thresholds and optima
    Optimize(commands::OptimizeArgs),
    /// Check the closed-form source model against the Fock-space oracle
    Validate(commands::ValidateArgs),
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::Rate { output, .. } => output,
            Command::Sweep(a) => &a.output,
            Command::Figure(a) => &a.output,
            Command::Optimize(a) => a.output(),
            Command::Validate(a) => &a.output,
        }
    }
}

/// Writes the table to `--out` or standard output.
fn emit(table: &Table, output: &OutputArgs) -> Result<(), CliError> {
    match output.out {
        Some(ref path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_table(table, output.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_table(table, output.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (table, verdict) = match cli.command {
        Command::Rate { ref config, .. } => (commands::rate(config)?, Ok(())),
        Command::Sweep(ref a) => (commands::sweep(a)?, Ok(())),
        Command::Figure(ref a) => (commands::figure(a)?, Ok(())),
        Command::Optimize(ref a) => commands::optimize(a)?,
        Command::Validate(ref a) => commands::validate(a)?,
    };
    emit(&table, cli.command.output())?;
    verdict
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("psmdi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
