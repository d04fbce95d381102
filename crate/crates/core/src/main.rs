mod cli;

use std::process::ExitCode;

fn main() -> ExitCode {
    match cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("phlat: {e:#}");
            ExitCode::from(cli::exit_code(&e))
        }
    }
}
