mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Failure, EXIT_USAGE};

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { params, output, sweep } => commands::check(params.resolve()?, &output, &sweep),
        Command::Points { params, output, range } => commands::points(params.resolve()?, &output, &range),
        Command::Solve {
            params,
            traj,
            output,
            sweep,
        } => commands::solve(params.resolve()?, traj.options(), &output, &sweep),
        Command::Portrait {
            params,
            traj,
            output,
            grid,
        } => commands::portrait(params.resolve()?, traj.options(), &output, &grid),
        Command::Reconstruct {
            params,
            traj,
            output,
            field,
        } => commands::reconstruct(params.resolve()?, traj.options(), &output, &field),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
