//! `tsv`: extract, sweep and check the TSV pair macromodel, and estimate
//! the oscillator spur it couples in.

mod extract;
mod output;
mod params;
mod spur;
mod sweep;
mod validate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use params::ParamArgs;

#[derive(Debug, Parser)]
#[command(
    name = "tsv",
    version,
    about = "TSV pair RLGC macromodel and substrate spur estimator"
)]
struct Cli {
    #[command(flatten)]
    params: ParamArgs,

    /// Print a machine-readable JSON summary on stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the .s3p file and |S21|/|S31| CSV for the configured structure.
    Extract(extract::ExtractArgs),
    /// Sweep one structural parameter and tabulate elements and coupling.
    Sweep(sweep::SweepArgs),
    /// Estimate the oscillator spur over an amplitude or frequency sweep.
    Spur(spur::SpurArgs),
    /// Run the self-consistency checks and report pass/fail.
    Validate(validate::ValidateArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = cli.params.resolve().and_then(|set| match &cli.command {
        Command::Extract(args) => extract::run(&set, args, cli.json),
        Command::Sweep(args) => sweep::run(&set, args, cli.json),
        Command::Spur(args) => spur::run(&set, args, cli.json),
        Command::Validate(args) => validate::run(&set, args, cli.json),
    });
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
