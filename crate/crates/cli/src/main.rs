mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{certify, heat, sharpness};

#[derive(Parser)]
#[command(
    name = "abmoser",
    version,
    about = "Numerical checks of heat kernels, Green kernels and sharp exponential-integrability constants for an Aharonov-Bohm potential"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the spectral and Poisson circle heat kernels and the T_a comparison envelope.
    HeatCheck(heat::HeatArgs),
    /// Scan the 4π threshold, the 8πe limit and the μ_p equality case.
    Sharpness(sharpness::SharpnessArgs),
    /// Fit and verify Green kernel bound certificates.
    Certify(certify::CertifyArgs),
}

/// Why a command did not succeed; decides the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation or parameters outside a module's preconditions (exit 2).
    Usage(String),
    /// The run completed but a contract was violated, or a computation failed (exit 1).
    Contract(String),
}

impl From<abmoser::Error> for Failure {
    fn from(e: abmoser::Error) -> Self {
        Failure::Contract(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Contract(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::HeatCheck(args) => heat::run(&args),
        Command::Sharpness(args) => sharpness::run(&args),
        Command::Certify(args) => certify::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Contract(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
