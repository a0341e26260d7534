use std::process::ExitCode;

use clap::Parser;
use qlink::cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qlink: some scan points failed; see the status column");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("qlink: {e}");
            ExitCode::FAILURE
        }
    }
}
