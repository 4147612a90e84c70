use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = aqc_cli::Cli::parse();
    match aqc_cli::execute(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.render());
            match outcome.failure {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
