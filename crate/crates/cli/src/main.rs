// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use rootcorr::Error;

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Core(e) => match e {
                Error::Parse { .. } => 2,
                Error::InvalidTriple(_) | Error::DivisionByZero | Error::ZeroPolynomial(_) => 3,
                Error::NotStandard => 4,
                Error::Arc(_) => 5,
                Error::Numeric(_) => 6,
                Error::InvalidArgument(_) => 7,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(Error::NotStandard) => {
                write!(f, "triple is not in standard form; run `reduce` or pass --auto-reduce")
            }
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
