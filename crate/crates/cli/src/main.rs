//! `qhs`: tables, exact identity verification, plot data and Gram matrices
//! for discrete q-Hermite I polynomials and their Sobolev-type modification.
//!
//! Exit codes: 0 success, 1 identity violation, 2 usage or domain error,
//! 3 numeric-precision warning.

mod args;
mod commands;
mod report;

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = commands::run(cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(outcome), Ok(())) => ExitCode::from(outcome.exit_code()),
        (Ok(_), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        (Err(e), _) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
