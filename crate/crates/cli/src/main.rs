//! `opkit`: plan, certify and apply operator decompositions from a JSON job file.
//!
//! Exit codes: 0 success, 2 input error, 3 resource cap, 4 verification failure.

mod commands;
mod job;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use job::{CliError, CliResult, Context, JobSpec, Mode, OrderName, Overrides};

#[derive(Parser)]
#[command(
    name = "opkit",
    version,
    about = "Exact decompositions of products of commuting operators"
)]
struct Cli {
    /// What to do with the job.
    #[arg(value_enum)]
    mode: Mode,
    /// Path of the JSON job file.
    #[arg(long)]
    job: PathBuf,
    /// Prose output instead of JSON.
    #[arg(long)]
    human: bool,
    /// Monomial order for Gröbner computations.
    #[arg(long, value_enum)]
    order: Option<OrderName>,
    /// Seed for randomly drawn data.
    #[arg(long)]
    seed: Option<u64>,
}

fn term_cap_from_env() -> CliResult<Option<usize>> {
    match std::env::var("OPKIT_TERM_CAP") {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                CliError::Input(format!(
                    "OPKIT_TERM_CAP must be a positive integer, got `{v}`"
                ))
            }),
    }
}

fn execute(cli: &Cli) -> CliResult<commands::Output> {
    let overrides = Overrides {
        order: cli.order,
        seed: cli.seed,
        term_cap: term_cap_from_env()?,
    };
    let ctx = Context::new(JobSpec::load(&cli.job)?, cli.mode, overrides)?;
    commands::run(cli.mode, &ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            let text = if cli.human {
                out.human.trim_end()
            } else {
                &out.json
            };
            // a closed pipe downstream is not an error of the job
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("opkit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
