//! Command-line front end for `avlab`.
//!
//! Exit codes: 0 success, 1 `check` tolerance exceeded, 2 usage, 3 data,
//! 4 configuration, 5 resource.

pub mod args;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod manifest;

use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli, argv: &[String]) -> i32 {
    match dispatch(cli, argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, argv: &[String]) -> CliResult<i32> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Resource(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Simulate(a) => commands::simulate_cmd(a).map(|_| EXIT_OK),
        Command::Estimate(a) => commands::estimate_cmd(a).map(|_| EXIT_OK),
        Command::Theory(a) => commands::theory_cmd(a).map(|_| EXIT_OK),
        Command::Experiment(a) => commands::experiment_cmd(a, argv).map(|_| EXIT_OK),
        Command::Check(a) => {
            commands::check_cmd(a).map(|ok| if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    })
}
