use std::process::ExitCode;

use mimo_pls::cli::{execute, parse_args, CliError};

fn main() -> ExitCode {
    let code = match parse_args(std::env::args_os()) {
        Ok(cfg) => execute(&cfg),
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            CliError::Clap(e).exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
