//! Fidelity trade-off curves for finite qubit ensembles.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 i/o error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod config;
mod output;
mod run;
mod svg;

use config::{OutputFormat, RunConfig};
use run::{cmd_curve, cmd_envelope, cmd_verify, AppError};

#[derive(Parser)]
#[command(
    name = "qtradeoff",
    version,
    about = "Trade-off between operation and estimation fidelity for N-qubit ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep per-shift trade-off curves and plot them.
    Curve(CommonArgs),
    /// Assemble the allowed-region boundary over all relevant shifts.
    Envelope(CommonArgs),
    /// Run the Monte-Carlo verification suite (N <= 8).
    Verify(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Ensemble size N (repeat the flag for a family of curves).
    #[arg(long = "n", required = true)]
    n: Vec<u32>,

    /// Stripe shifts to sweep; defaults to every relevant shift for N.
    #[arg(long = "k")]
    k: Vec<i32>,

    /// Number of sweep points on [0, 1] (also the table resolution).
    #[arg(long = "x-points", default_value_t = 401)]
    x_points: usize,

    /// Monte-Carlo samples per verification check.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,

    /// Random seed; falls back to QTRADEOFF_SEED, then a fixed default.
    #[arg(long)]
    seed: Option<u64>,

    /// Table output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Output directory.
    #[arg(long = "out", default_value = ".")]
    out: PathBuf,

    /// Plot with both fidelities rescaled onto [0, 1].
    #[arg(long)]
    relative: bool,
}

impl CommonArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            n: self.n,
            k_list: if self.k.is_empty() {
                None
            } else {
                Some(self.k)
            },
            x_points: self.x_points,
            samples: self.samples,
            seed: RunConfig::resolve_seed(self.seed),
            output_dir: self.out,
            format: match self.format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            },
            relative: self.relative,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = |args: CommonArgs, f: fn(&RunConfig) -> Result<bool, AppError>| {
        let config = args.into_config();
        if let Err(message) = config.validate() {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
        match f(&config) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("verification failed; see the report files");
                ExitCode::from(1)
            }
            Err(AppError { code, message }) => {
                eprintln!("error: {message}");
                ExitCode::from(code as u8)
            }
        }
    };
    match cli.command {
        Command::Curve(args) => run(args, |c| cmd_curve(c).map(|()| true)),
        Command::Envelope(args) => run(args, |c| cmd_envelope(c).map(|()| true)),
        Command::Verify(args) => run(args, cmd_verify),
    }
}
