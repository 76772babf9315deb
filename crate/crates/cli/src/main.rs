use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qubit_md_cli::commands::{cmd_solve, cmd_sweep, cmd_verify, Flags, EXIT_PARSE};

/// Minimum-error discrimination of up to four qubit states
#[derive(Parser, Debug)]
#[command(name = "qubit-md", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance for PSD, completeness and Bloch-norm checks
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for the random POVM sampler
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of random POVMs evaluated by `verify`
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: usize,

    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal measurement, complementary states, condition trace and certificate
    Solve { path: PathBuf },
    /// Compare the solver against the numerical dual, the two-state formula and random POVMs
    Verify { path: PathBuf },
    /// Guessing probability of the asymmetric four-state family over a grid of h, as CSV
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        h_min: f64,
        /// Defaults to √2 − 1
        #[arg(long)]
        h_max: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Output file; standard output when omitted
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE as u8 } else { 0 });
        }
    };
    let flags = Flags {
        tol: cli.tol,
        seed: cli.seed,
        trials: cli.trials,
        json: cli.json,
    };
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let code = match &cli.command {
        Command::Solve { path } => cmd_solve(path, &flags, &mut out, &mut err),
        Command::Verify { path } => cmd_verify(path, &flags, &mut out, &mut err),
        Command::Sweep {
            h_min,
            h_max,
            steps,
            out: path,
        } => cmd_sweep(
            *h_min,
            h_max.unwrap_or(qubit_md::families::ASYMMETRIC_FOUR_H_MAX),
            *steps,
            path.as_deref(),
            &flags,
            &mut out,
            &mut err,
        ),
    };
    ExitCode::from(code as u8)
}
