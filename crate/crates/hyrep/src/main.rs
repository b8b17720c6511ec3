use std::process::ExitCode;

use clap::Parser;
use hyrep::cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with 2 on usage errors by itself
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
