use std::process::ExitCode;

use clap::Parser;
use freqborn::cli::Cli;
use freqborn::commands::{common_args, execute, limits_from_env};
use freqborn::error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    let limits = limits_from_env()?;
    let outcome = execute(&cli.command, &limits)?;
    let common = common_args(&cli.command);
    outcome.report.emit(common.format, common.out.as_deref())?;
    match outcome.violation {
        Some(msg) => Err(CliError::Contract(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("freqborn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
