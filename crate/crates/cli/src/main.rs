//! `aqm`: run the worked scenarios and report pass/fail checks.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "aqm",
    version,
    about = "Finite-dimensional algebraic quantum mechanics scenarios"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration file (the instance file for `ks`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for all random streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sample count (states, samples per pair, directions or elements).
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Tolerance of the scenario's headline check.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CHSH combination: exact, contextual sampling and a local simulation.
    Chsh {
        /// Exact correlations only, no sampling.
        #[arg(long)]
        exact: bool,
        /// Use a = 0, b = pi/8, a' = pi/4, b' = 3pi/8.
        #[arg(long)]
        eighth_turn: bool,
    },
    /// Kochen-Specker colouring of a direction set.
    Ks,
    /// Two-slit momentum distribution.
    TwoSlit {
        #[arg(long, value_enum, default_value_t = SlitChoice::Both)]
        slits: SlitChoice,
    },
    /// Oscillator Green functions in a truncated Fock space.
    Oscillator,
    /// Singlet collapse after measuring particle B.
    Epr {
        /// Measurement direction `x,y,z`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<f64>>,
        /// Recorded outcome, `0.5` or `-0.5`.
        #[arg(long, allow_hyphen_values = true)]
        outcome: Option<f64>,
    },
    /// Two-level elementary states and time averages.
    TwoLevel,
    /// GNS representations of pure and mixed states on M2 and M3.
    GnsDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SlitChoice {
    Both,
    AOnly,
    BOnly,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match cli.command {
        Command::Chsh { exact, eighth_turn } => commands::chsh(c, exact, eighth_turn),
        Command::Ks => commands::ks(c),
        Command::TwoSlit { slits } => commands::two_slit(c, slits),
        Command::Oscillator => commands::oscillator(c),
        Command::Epr { direction, outcome } => commands::epr(c, direction, outcome),
        Command::TwoLevel => commands::two_level(c),
        Command::GnsDemo => commands::gns_demo(c),
    };
    match result.and_then(|r| report::emit(c, &r).map(|()| r.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
