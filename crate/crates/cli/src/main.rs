//! `slopeforge` command-line front end.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "slopeforge", version, about = "Slope constructions for Lefschetz fibrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Curve catalog file; replaces the builtin catalog.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invariants of a word file.
    Invariants {
        #[arg(long)]
        word: PathBuf,
        #[arg(short = 'g', long = "genus", visible_alias = "g")]
        genus: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Build a construction and report its ledger.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Find (k, l) copies of the low and high blocks with slope near r.
    Approx(ApproxArgs),
    /// Check catalog data and relator triviality.
    Validate {
        /// Genera to check for the builtin catalog.
        #[arg(short = 'g', long = "genus", visible_alias = "g", num_args = 1.., default_values_t = [1usize, 2, 3, 4, 5, 6, 7, 8])]
        genus: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Print a builtin relator and its (e, sigma) deltas.
    Relator(RelatorArgs),
}

#[derive(Debug, Args)]
pub struct Emit {
    /// Write the factorization as a word file, plus `<path>.catalog`.
    #[arg(long)]
    pub emit_word: Option<PathBuf>,
    #[arg(long)]
    pub emit_csv: Option<PathBuf>,
    /// Recompute (e, sigma) from the word with the signature engine.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Subcommand)]
pub enum ConstructKind {
    HighSlope {
        #[arg(short = 'g', long = "genus", visible_alias = "g")]
        genus: usize,
        #[arg(long = "h")]
        h: usize,
        #[command(flatten)]
        emit: Emit,
        #[command(flatten)]
        common: Common,
    },
    Counterexample {
        #[arg(short = 'g', long = "genus", visible_alias = "g")]
        genus: usize,
        #[command(flatten)]
        emit: Emit,
        #[command(flatten)]
        common: Common,
    },
    Sequence {
        #[arg(short = 'g', long = "genus", visible_alias = "g")]
        genus: usize,
        #[arg(long = "h")]
        h: usize,
        #[arg(long = "m")]
        m: usize,
        #[command(flatten)]
        emit: Emit,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Target slope, decimal or p/q.
    #[arg(long = "r", allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, default_value = "1e-6", allow_hyphen_values = true)]
    pub eps: String,
    #[arg(short = 'g', long = "genus", visible_alias = "g")]
    pub genus: Option<usize>,
    /// Star parameter of the high block; defaults to h_max(g).
    #[arg(long = "h")]
    pub h: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub max_copies: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelatorName {
    Hyperelliptic,
    Matsumoto,
    ChainOdd,
    ChainEven,
    Star,
}

#[derive(Debug, Args)]
pub struct RelatorArgs {
    #[arg(long, value_enum)]
    pub kind: RelatorName,
    #[arg(short = 'g', long = "genus", visible_alias = "g")]
    pub genus: usize,
    /// Star parameter h, or chain half-length k.
    #[arg(long = "h", default_value_t = 1)]
    pub h: usize,
    #[command(flatten)]
    pub emit: Emit,
    #[command(flatten)]
    pub common: Common,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Invariants { word, genus, common } => commands::invariants(&mut out, &word, genus, &common),
        Command::Construct { kind } => commands::construct(&mut out, kind),
        Command::Approx(args) => commands::approx(&mut out, &args),
        Command::Validate { genus, common } => commands::validate(&mut out, &genus, &common),
        Command::Relator(args) => commands::relator(&mut out, &args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
