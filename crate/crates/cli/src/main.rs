use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pfluid_cli::{parse_config, run, CliError, ConfigError};

/// Solver and verification harness for shear-thinning incompressible flow.
///
/// Set PFLUID_LOG (error, warn, info, debug, trace) for log output on stderr.
#[derive(Debug, Parser)]
#[command(name = "pfluid", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for element loops and study levels.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: &Args) -> Result<String, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.output {
        cfg.output = Some(out.clone());
    }
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("pfluid-output"));
    let summary = run(&cfg, &out)?;
    Ok(summary.text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PFLUID_LOG", "warn")).init();
    let args = Args::parse();
    match execute(&args) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
