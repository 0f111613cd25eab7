//! Thin command-line front end: `smatrix-lab <experiment> --config <path>`.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric failure, 4 contract
//! violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use smatrix_lab::cli::{run, CliError, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "smatrix-lab", version, about = "Run a named experiment from a config file")]
struct Args {
    /// Experiment to execute.
    #[arg(value_enum)]
    experiment: Experiment,
    /// Flat key-value config file (one `key = value` per line).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    // Single-threaded BLAS keeps reports bitwise reproducible run to run.
    std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    std::env::set_var("OMP_NUM_THREADS", "1");

    let args = Args::parse();
    match execute(args) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: Args) -> Result<String, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        CliError::Config(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(out) = args.out {
        cfg.raw
            .insert("output_dir".to_string(), out.display().to_string());
        cfg.output_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.raw.insert("seed".to_string(), seed.to_string());
        cfg.seed = seed;
    }
    let outcome = run(args.experiment, &cfg)?;
    Ok(format!(
        "{}\nreport: {}",
        outcome.summary,
        outcome.report_path.display()
    ))
}
