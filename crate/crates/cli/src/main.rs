//! `matvar`: command-line front end for the matrix variance bounds.
//!
//! Exit codes: 0 pass, 1 I/O or usage, 2 membership residual, 3 singular coefficient,
//! 4 class failure or diverging moments, 5 no sampler, 6 a verdict failed,
//! 7 Monte Carlo disagreement.

mod args;
mod commands;
mod config;
mod failure;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use config::Job;
use failure::{code, CliResult};
use output::Printer;

fn run(cli: Cli) -> CliResult<i32> {
    let (common, command): (_, fn(&Job, &Printer) -> CliResult<i32>) = match &cli.command {
        Command::InferQ(c) => (c, commands::infer_q),
        Command::Verify(c) => (c, commands::verify),
        Command::Bounds(c) => (c, commands::bounds),
        Command::Chain(c) => (c, commands::chain),
        Command::McVerify(c) => (c, commands::mc_verify),
    };
    let job = Job::resolve(common)?;
    let printer = Printer { quiet: job.quiet };
    command(&job, &printer)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(code::USAGE as u8),
            };
        }
    };
    match run(cli) {
        Ok(c) => ExitCode::from(c as u8),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
