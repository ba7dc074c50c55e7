use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ocrs::harness::{self, ExperimentConfig, Mode, EXIT_INVALID_CONFIG};

/// Run a chain-building, selection or verification experiment from a JSON config.
#[derive(Parser, Debug)]
#[command(name = "ocrs", version)]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Replaces the config's mode.
    #[arg(long, value_name = "M")]
    mode: Option<String>,
    /// Replaces the config's seed.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Replaces the config's trial count.
    #[arg(long, value_name = "T")]
    trials: Option<usize>,
    /// Report path; the CSV table is written next to it. Defaults to the
    /// config's output, else stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, value_name = "K", env = "OCRS_THREADS")]
    threads: Option<usize>,
}

fn execute(cli: Cli) -> ocrs::Result<i32> {
    let mut config = ExperimentConfig::load(&cli.config)?;
    if let Some(mode) = &cli.mode {
        config.mode = Mode::parse(mode)?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    if let Some(out) = cli.out {
        config.output = Some(out);
    }
    if let Some(k) = cli.threads.filter(|&k| k > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| ocrs::OcrsError::Config(e.to_string()))?;
    }
    let report = harness::run(&config)?;
    match &config.output {
        Some(path) => {
            let (json, csv) = report.write(path)?;
            eprintln!("wrote {} and {}", json.display(), csv.display());
        }
        None => print!("{}", report.to_json()?),
    }
    for v in &report.verdicts {
        eprintln!(
            "{} {}: measured {} vs bound {} (tolerance {})",
            if v.pass { "PASS" } else { "FAIL" },
            v.check,
            v.measured,
            v.bound,
            v.tolerance
        );
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INVALID_CONFIG as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID_CONFIG as u8)
        }
    }
}
