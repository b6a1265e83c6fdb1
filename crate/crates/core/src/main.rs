use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use chwave::cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<CliError>()
                .map_or(1, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let outcome = run(cli)
        .map_err(anyhow::Error::new)
        .context("command failed")?;
    for line in &outcome.messages {
        println!("{line}");
    }
    for path in &outcome.files {
        println!("wrote {}", path.display());
    }
    Ok(())
}
