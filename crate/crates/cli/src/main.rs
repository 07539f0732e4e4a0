//! `tsdr`: simulation sweeps, dataset analysis and plot-data export for
//! transformed sufficient dimension reduction.

mod analyze;
mod plotdata;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tsdr_core::Error;

#[derive(Parser)]
#[command(
    name = "tsdr",
    about = "Transformed sufficient dimension reduction: T-SIR, YJ-SIR, MAVE, T-MAVE",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded simulation sweep and write result tables.
    Simulate(SimulateArgs),
    /// Estimate the structural dimension and directions for a CSV dataset.
    Analyze(AnalyzeArgs),
    /// Turn an analyze run into per-direction plot-data files.
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// TOML experiment configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scenario name (case1..case8, example1..example4).
    #[arg(long)]
    pub scenario: Option<String>,
    /// Method to run; repeat the flag for several.
    #[arg(long = "method")]
    pub methods: Vec<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of response slices for SIR-family methods.
    #[arg(long)]
    pub slices: Option<usize>,
    /// Level of the sequential dimension test.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Roughness penalty for the fitted monotone transforms.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Predictor correlation (examples only).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Degrees of freedom (case7 only).
    #[arg(long)]
    pub df: Option<u32>,
    /// Run the RSS dimension criterion for MAVE-family methods.
    #[arg(long)]
    pub select_dimension: bool,
    /// Output directory.
    #[arg(long, env = "TSDR_OUT_DIR", default_value = "tsdr-out")]
    pub out: PathBuf,
    /// Worker threads for replications (1 = serial; 0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// CSV dataset with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    pub response: String,
    /// Estimator: sir, t-sir, yj-sir, mave or t-mave.
    #[arg(long)]
    pub method: String,
    #[arg(long, default_value_t = 10)]
    pub slices: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.001)]
    pub lambda: f64,
    /// Largest dimension the MAVE-family criterion searches.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, env = "TSDR_OUT_DIR", default_value = "tsdr-out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PlotdataArgs {
    /// Directory holding a prior analyze run.
    #[arg(long)]
    pub from: PathBuf,
    /// Output directory (defaults to the analyze directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Plotdata(args) => plotdata::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let usage = matches!(
                err,
                Error::UnknownScenario(..)
                    | Error::InvalidScenarioParameter(..)
                    | Error::Config(..)
            );
            if usage {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
