mod args;
mod commands;
mod config;
mod io;
mod serve;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::commands::Env;
use crate::io::UsageError;

fn run(cli: Cli) -> anyhow::Result<()> {
    let common = config::apply(cli.common)?;
    commands::run(&Env::new(common), cli.command)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() { ExitCode::from(1) } else { ExitCode::from(2) }
        }
    }
}
