//! `eqop`: generate paired datasets, train and evaluate linear models with
//! distributed latent operators, and verify the operator theory.
//!
//! Exit codes: 0 success, 1 I/O, 2 usage or config, 3 verification failure.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;
use eqop::Execution;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    eqop::par::init_threads_from_env();
    let exec = Execution::from_env();
    let result = match &cli.command {
        Command::GenData(a) => commands::gen_data(a, exec),
        Command::Train(a) => commands::train_cmd(a),
        Command::Eval(a) => commands::eval_cmd(a, exec),
        Command::Verify(a) => commands::verify_cmd(a, exec),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
