//! Command-line front end for the uplink link-level simulator.
//!
//! `nrsim simulate` runs a configured SNR sweep and writes a CSV report,
//! `nrsim filters design` dumps a lowpass prototype and its frequency
//! response, and `nrsim ldpc selftest` round-trips the bundled codes as
//! a quick health check.

mod filters;
mod selftest;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "nrsim", version, about = "5G NR uplink link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo SNR sweep and write a CSV report.
    Simulate(simulate::Args),
    /// Filter design utilities.
    #[command(subcommand)]
    Filters(FiltersCommand),
    /// LDPC codec utilities.
    #[command(subcommand)]
    Ldpc(LdpcCommand),
}

#[derive(Subcommand)]
enum FiltersCommand {
    /// Design a lowpass prototype and dump its taps and response.
    Design(filters::Args),
}

#[derive(Subcommand)]
enum LdpcCommand {
    /// Encode/decode round-trips over both base graphs at several
    /// lifting sizes, plus a check-update approximation bound.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate::run(&args),
        Command::Filters(FiltersCommand::Design(args)) => filters::run(&args),
        Command::Ldpc(LdpcCommand::Selftest) => selftest::run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
