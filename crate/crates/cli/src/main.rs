use std::process::ExitCode;

use clap::Parser;
use env_logger::Env;
use rmabf_cli::commands::set_jobs;
use rmabf_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(Env::new().filter_or("RMABF_LOG", "warn")).init();
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match set_jobs(cli.command.args().jobs).and_then(|()| run(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
