use std::process::ExitCode;

use clap::Parser;
use trineumann::cli::{init_threads, run, Cli, EXIT_RUNTIME};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| run(cli, &mut std::io::stdout().lock()));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
