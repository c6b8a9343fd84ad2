//! Command-line driver: fractional derivatives, extremal solving,
//! conservation checks and the worked examples.

mod config;
mod deriv;
mod error;
mod example;
mod solve;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "fracvar", version, about = "Discrete fractional calculus of variations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a fractional derivative or integral to a signal.
    Deriv(deriv::DerivArgs),
    /// Solve the fractional Euler–Lagrange equations.
    Solve(solve::SolveArgs),
    /// Check a conservation law along a path.
    Verify(verify::VerifyArgs),
    /// Reproduce one of the two worked examples.
    Example(example::ExampleArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Deriv(a) => deriv::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Example(a) => example::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
