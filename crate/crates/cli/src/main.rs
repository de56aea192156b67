mod export;
mod job;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::run::{Options, RunError};

#[derive(Parser)]
#[command(name = "isominimal", version, about = "Minimal surfaces in simply isotropic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON job file.
    Run {
        job: PathBuf,
        /// Exit with status 1 when a check fails.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Tolerance for every check, replacing the per-check defaults.
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    let Command::Run { job, check, out_dir, tol } = Cli::parse().command;
    if let Some(t) = tol {
        if !(t.is_finite() && t >= 0.0) {
            eprintln!("error: --tol must be a non-negative number");
            return ExitCode::from(2);
        }
    }
    let text = match std::fs::read_to_string(&job) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", job.display());
            return ExitCode::from(2);
        }
    };
    let parsed = match job::parse_job(&text) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("schema error: {e}");
            return ExitCode::from(2);
        }
    };
    let stem = job.file_stem().and_then(|s| s.to_str()).unwrap_or("job");
    match run::run(&parsed, stem, &Options { out_dir, tol }) {
        Ok((report, path)) => {
            if let Some(result) = &report.result {
                println!("{result}");
            }
            for c in &report.checks {
                println!("{} {} {:.3e} (tol {:.1e})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.residual, c.tol);
            }
            println!("report: {}", path.display());
            if check && !report.passed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(RunError::Schema(e)) => {
            eprintln!("schema error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
