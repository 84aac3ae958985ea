mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::Case(a) => commands::case(a),
        Command::Search(a) => commands::search(a),
        Command::List(a) => commands::list(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            eprintln!("hmod: {message}");
            ExitCode::from(code)
        }
    }
}
