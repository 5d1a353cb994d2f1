//! `localview` command-line front end.
//!
//! Every subcommand reads a topology JSON document, runs one analysis and
//! prints either a short text summary or, with `--json`, a run report.
//!
//! Exit codes: 0 success, 1 internal error, 2 parse or validation failure,
//! 3 size cap exceeded without `--approx`, 4 I/O failure.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "localview",
    version,
    about = "Normalized sum-capacity analysis for interference networks under local views"
)]
pub struct Cli {
    /// Emit a machine-readable JSON run report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Allow heuristic fallbacks when exact search would exceed its size caps.
    #[arg(long, global = true)]
    pub approx: bool,
    /// Use achievable-rate formulas exactly as printed, without repairs.
    #[arg(long, global = true)]
    pub strict_paper: bool,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify each connected component of a topology.
    Classify { file: PathBuf },
    /// Bounds on the normalized sum-capacity with an h-hop view.
    Alpha {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        hops: u32,
    },
    /// Emit an optimal independent-graph (or coded-set) schedule.
    Schedule {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        hops: u32,
        /// Search coded-set schedules (one-hop view only).
        #[arg(long)]
        coded: bool,
        /// Write the schedule document to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Gain draws used to verify the emitted schedule.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Simulate a schedule on random deterministic gains and check decoding.
    Verify {
        file: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fractional and k-fold chromatic numbers of the conflict graph.
    Coloring {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
    },
    /// Three-user double-Z chain calculators.
    Zchain(ZchainArgs),
    /// Write the alpha-versus-h curve as CSV.
    Curve {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZchainModel {
    Det,
    Gauss,
}

#[derive(Debug, Args)]
pub struct ZchainArgs {
    pub model: ZchainModel,
    /// Five gains: n11,n22,n33,n12,n23 (det) or SNR1,SNR2,SNR3,INR2,INR3 (gauss).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gains: Option<Vec<String>>,
    /// Read Gaussian gains in dB.
    #[arg(long)]
    pub db: bool,
    /// Sweep a grid: the largest gain for det, comma-separated dB values for
    /// gauss (`default` for 0,10,...,60).
    #[arg(long)]
    pub sweep: Option<String>,
    /// CSV file for sweep rows.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(&cli, &argv) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: writing output: {e}");
                    ExitCode::from(4)
                }
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
