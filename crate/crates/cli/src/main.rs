//! `bethe` command-line tool.
//!
//! Exit codes: 0 on success, 1 for usage errors and invalid input, 2 for
//! numerical failures (non-convergence, precision exhaustion, inconsistent
//! expansions).

mod args;
mod commands;
mod render;

use std::process::ExitCode;

use args::{Format, ParseError};

const USAGE: u8 = 1;
const NUMERICAL: u8 = 2;

fn main() -> ExitCode {
    let config = match args::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(ParseError::Clap(e)) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
        Err(ParseError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(USAGE);
        }
    };
    let output = match commands::run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_numerical() { NUMERICAL } else { USAGE });
        }
    };
    let mut text = match config.format {
        Format::Json => output.json,
        Format::Table => output.table,
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &config.output_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(USAGE);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
