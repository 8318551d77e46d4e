use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use commands::Overrides;
use config::{Format, SweepConfig};
use error::CliError;
use output::{render_svg, ChartSpec, Table};

/// Effective-rate and delay-bound sweeps for two-user downlink NOMA over
/// α-μ fading.
#[derive(Debug, Parser)]
#[command(name = "noma-effrate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML sweep configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for the grid.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for the queue simulation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies every arrival rate of the dvp sweep.
    #[arg(long, global = true)]
    lambda_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// NOMA and OMA effective rates over the grid.
    Er,
    /// Delay-violation bound, with the simulated queue when sim.slots > 0.
    Dvp,
    /// Exact sum rate against the high- and low-SNR approximations.
    Approx,
    /// Best strong-user power share per grid point.
    Power,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
    let cfg = SweepConfig::load(path)?;
    if let Some(scale) = cli.lambda_scale {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(CliError::Usage(format!(
                "--lambda-scale must be positive, got {scale}"
            )));
        }
    }
    let overrides = Overrides {
        seed: cli.seed,
        lambda_scale: cli.lambda_scale,
    };
    let jobs = cli.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let (table, chart): (Table, ChartSpec) = pool.install(|| -> Result<_, CliError> {
        Ok(match cli.command {
            Command::Er => (commands::er_sweep(&cfg)?, commands::er_chart()),
            Command::Dvp => (commands::dvp(&cfg, overrides)?, commands::dvp_chart()),
            Command::Approx => (commands::approx(&cfg)?, commands::approx_chart()),
            Command::Power => (commands::power(&cfg)?, commands::power_chart()),
        })
    })?;

    let format = cli.format.unwrap_or(cfg.output.format);
    let target = cli.out.clone().or_else(|| cfg.output.path.clone());
    let sink: Box<dyn Write> = match &target {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Io {
            path: p.clone(),
            message: e.to_string(),
        })?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let io_err = |e: io::Error| CliError::Usage(format!("writing output: {e}"));
    match format {
        Format::Csv => table.write_csv(&mut sink)?,
        Format::Svg => sink
            .write_all(render_svg(&table, &chart).as_bytes())
            .map_err(io_err)?,
    }
    sink.flush().map_err(io_err)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NOMA_EFFRATE_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
