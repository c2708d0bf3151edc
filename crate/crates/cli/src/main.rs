use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use lagp_cli::args::Cli;
use lagp_cli::{run, EXIT_CONFIG, EXIT_OK};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            return ExitCode::from(code as u8);
        }
    };
    let code = match cli.into_config().and_then(|cfg| run(&cfg)) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
