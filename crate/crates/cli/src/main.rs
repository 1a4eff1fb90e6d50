//! `cpf`: reflection, fidelity and two-ion gate runs from the command line.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cpf",
    version,
    about = "Cavity-QED controlled-phase-flip gate simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reflect one pulse off the empty and the coupled cavity.
    Reflect(Overrides),
    /// Minimum gate fidelity for each pulse duration in the sweep.
    FidelitySweep(Overrides),
    /// Fidelity of the composite two-ion gate over a grid of inputs.
    TwoAtomGate(Overrides),
    /// Coupling, decay, loss and operation-count estimates.
    Params(Overrides),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Reflect(o) => commands::reflect(&RunConfig::resolve(&o)?),
        Command::FidelitySweep(o) => commands::fidelity_sweep(&RunConfig::resolve(&o)?),
        Command::TwoAtomGate(o) => commands::two_atom_gate(&RunConfig::resolve(&o)?),
        Command::Params(o) => {
            let mut config = RunConfig::resolve(&o)?;
            config.output.format = o.format.unwrap_or(config::Format::Json);
            print!("{}", commands::params(&config, o.out.is_some())?);
            Ok(())
        }
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
            eprintln!("cpf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
