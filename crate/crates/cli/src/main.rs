mod args;
mod run;
mod svg;

use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

// Exit codes: 0 success, 1 usage/domain/validation errors, 2 runtime
// (filter or update) failures.
fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            ExitCode::from(if e.is_runtime() { 2 } else { 1 })
        }
    }
}
