use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser, Debug)]
#[command(
    name = "grouptest",
    version,
    about = "Exact simulation of Fourier-sampling property testers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the state-space identities and distance bounds on random functions.
    VerifyLemmas(VerifyArgs),
    /// Larger-period tester over an abelian product (character samples).
    Period(PeriodArgs),
    /// Larger-period tester over any supported group (irrep samples).
    PeriodGeneral(PeriodArgs),
    /// Common-coset-range tester on pairs of functions.
    Ccr(CcrArgs),
    /// Classical cross-collision experiment on the D1/D2 pair distributions.
    Lowerbound(LowerBoundArgs),
    /// Generate an instance and write it as replayable JSON.
    GenInstance(GenArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Master seed; per-trial streams are derived from it by trial index.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Instance kind (periodic, far-from-lp, hidden-translation,
    /// disjoint-range, D1, D2) or a path to an instance JSON file.
    #[arg(long)]
    pub instance: Option<String>,
    /// Period subgroup `gens=...` for periodic and far-from-lp instances.
    #[arg(long = "H")]
    pub h: Option<String>,
    /// Translation element for hidden-translation instances.
    #[arg(long)]
    pub u: Option<String>,
    /// Size of the value set.
    #[arg(long)]
    pub values: Option<u64>,
    /// Fraction of points perturbed for far-from-lp instances.
    #[arg(long)]
    pub distance: Option<f64>,
    /// Explicit comma-separated table (custom instance; f0 for pairs).
    #[arg(long)]
    pub table: Option<String>,
    /// Explicit table for f1 of a custom pair.
    #[arg(long)]
    pub table1: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Size of the value set for random functions.
    #[arg(long, default_value_t = 5)]
    pub values: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PeriodArgs {
    /// Group spec; optional when the instance file names the group.
    #[arg(long)]
    pub group: Option<String>,
    /// Known normal subgroup `gens=...` (trivial when absent).
    #[arg(long = "K")]
    pub k: Option<String>,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CcrArgs {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    /// Largest admissible subgroup order.
    #[arg(long)]
    pub k: u64,
    /// Number of normal generators.
    #[arg(long, default_value_t = 1)]
    pub t: u32,
    /// Cap on the subgroup enumeration work.
    #[arg(long, default_value_t = grouptest::group::DEFAULT_TUPLE_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LowerBoundArgs {
    #[arg(long, default_value = "Z4096")]
    pub group: String,
    /// Query budgets, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,8,256")]
    pub q: Vec<u64>,
    /// Trials per distribution.
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub group: String,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyLemmas(a) => commands::verify_lemmas(a),
        Command::Period(a) => commands::period(a, false),
        Command::PeriodGeneral(a) => commands::period(a, true),
        Command::Ccr(a) => commands::ccr(a),
        Command::Lowerbound(a) => commands::lowerbound(a),
        Command::GenInstance(a) => commands::gen_instance(a),
    };
    match result {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::Violation(msg)) => {
            eprintln!("invariant violation: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
