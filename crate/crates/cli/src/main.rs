use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ibm_exit_cli::{run, ConfigError, ExperimentConfig, EXIT_FAILURE, EXIT_INVALID_CONFIG, WORKERS_ENV};

/// Exit-time experiments for iterated and Brownian-time Brownian motion.
#[derive(Debug, Parser)]
#[command(name = "ibm-exit", version)]
struct Args {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; overrides the configured one. Without either the
    /// CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Never changes the numbers produced.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

fn load(args: &Args) -> Result<ExperimentConfig, String> {
    let text =
        std::fs::read_to_string(&args.config).map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut config = ExperimentConfig::parse_json(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        config.master_seed = Some(seed);
    }
    if let Some(out) = &args.out {
        config.output = Some(out.clone());
    }
    config.validate().map_err(|e: ConfigError| e.to_string())?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match load(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID_CONFIG as u8);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start workers: {e}");
            return ExitCode::from(EXIT_FAILURE as u8);
        }
    };
    let outcome = match pool.install(|| run(&config)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE as u8);
        }
    };
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_FAILURE as u8);
            }
        }
        None => print!("{}", outcome.csv),
    }
    eprint!("{}", outcome.summary);
    ExitCode::from(outcome.status as u8)
}
