//! `stabspan` command-line front end.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "stabspan", version, about = "Operator-span analysis of Clifford+T measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Largest total qubit count the dense oracle may simulate.
    #[arg(long, default_value_t = stabspan::dense::DEFAULT_DENSE_CAP, global = true)]
    pub dense_cap: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute s_mu and the effective-POVM structure of a circuit or stabilizer group.
    Analyze(commands::AnalyzeArgs),
    /// Run the golden fixtures and compare against expected values.
    Examples(commands::ExamplesArgs),
    /// Run a search task file.
    Search(commands::SearchArgs),
    /// Print the T-count bounds for n data qubits.
    Bounds(commands::BoundsArgs),
    /// Dump dense POVM elements and the frame operator as JSON matrices.
    OracleDump(commands::AnalyzeArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
