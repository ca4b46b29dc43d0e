use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use scar_cli::commands::{
    cmd_filter, cmd_fit, cmd_forecast, cmd_lorenz, cmd_scar, FilterArgs, FitArgs, FitMethod, ForecastJob, LorenzJob,
    ScarArgs,
};
use scar_cli::complex::parse_complex;
use scar_cli::config::load_config;
use scar_cli::experiment::{run_sweep, ExperimentConfig};
use scar_cli::{apply_budget_env, CliError, CliResult};
use scar_core::scar::ScarOptions;
use scar_core::signals::SeriesFormat;
use scar_core::Complex64;

#[derive(Parser)]
#[command(name = "scar", version, about = "Stable and consistent AR-3 filters from equilibrium statistics")]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Auto,
    Complex,
    Rmm,
}

impl From<Format> for SeriesFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Auto => SeriesFormat::Auto,
            Format::Complex => SeriesFormat::Complex,
            Format::Rmm => SeriesFormat::Rmm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Unconstrained Yule-Walker.
    Yw,
    /// Yule-Walker with both consistency equalities (needs --lambda).
    Cyw,
}

fn complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

#[derive(Subcommand)]
enum Command {
    /// Construct a SCAR-3 certificate and model for a given lambda.
    ///
    /// SCAR_BUDGET_SECS caps the exact elimination time before the numeric
    /// fallback takes over.
    Scar {
        /// Continuous decay/oscillation rate, e.g. -8.312-8.569i.
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        lambda: Complex64,
        /// Noise amplitude; the model uses Q = sigma^2 dt.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Model step; defaults to dt_hat / 2.
        #[arg(long)]
        dt: Option<f64>,
        /// Output directory for certificate.json and model.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Skip the exact elimination and search numerically.
        #[arg(long)]
        numeric_only: bool,
        /// Leave the creation time out of the certificate.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Fit an AR model to a series by (constrained) Yule-Walker regression.
    Fit {
        /// Series file (t,re,im or date,rmm1,rmm2).
        series: PathBuf,
        #[arg(long, value_enum, default_value = "yw")]
        method: Method,
        #[arg(long, short, default_value_t = 3)]
        p: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        lambda: Option<Complex64>,
        /// Select p in 1..=PMAX by the AIC-style criterion first.
        #[arg(long, value_name = "PMAX")]
        aic: Option<usize>,
        #[arg(long, value_enum, default_value = "auto")]
        format: Format,
        /// Model JSON path; diagnostics go next to it.
        #[arg(long, default_value = "model.json")]
        out: PathBuf,
    },
    /// Run one Kalman filter experiment with a model file against a truth series.
    Filter {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: Format,
        /// Observe every n-th step.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Observation variance as a fraction of the truth energy.
        #[arg(long, default_value_t = 0.1)]
        r_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the filtered track here.
        #[arg(long)]
        track: Option<PathBuf>,
    },
    /// Run a filtering sweep described by a TOML or JSON config.
    Sweep { config: PathBuf },
    /// Ensemble forecast experiment described by a TOML or JSON config.
    Forecast { config: PathBuf },
    /// Integrate Lorenz-96 and measure Fourier-mode statistics.
    Lorenz {
        /// TOML or JSON config; defaults when omitted.
        config: Option<PathBuf>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    match cli.command {
        Command::Scar { lambda, sigma, dt, out, numeric_only, no_timestamp } => {
            let mut options = ScarOptions { numeric_only, ..ScarOptions::default() };
            apply_budget_env(&mut options)?;
            let args = ScarArgs { lambda, sigma, dt, out_dir: out, options, timestamp: !no_timestamp };
            let (_, _, text) = cmd_scar(&args)?;
            print!("{text}");
        }
        Command::Fit { series, method, p, lambda, aic, format, out } => {
            let method = match method {
                Method::Yw => FitMethod::Yw,
                Method::Cyw => FitMethod::Cyw,
            };
            let args = FitArgs { series, format: format.into(), method, p, lambda, aic, out };
            let (_, _, text) = cmd_fit(&args)?;
            print!("{text}");
        }
        Command::Filter { model, truth, format, n, r_fraction, seed, track } => {
            let args = FilterArgs { model, truth, format: format.into(), n, r_fraction, seed, track };
            println!("{}", cmd_filter(&args)?);
        }
        Command::Sweep { config } => {
            let mut cfg: ExperimentConfig = load_config(&config)?;
            apply_budget_env(&mut cfg.scar)?;
            let outcome = run_sweep(&cfg, Some(&config))?;
            print!("{}", outcome.report());
        }
        Command::Forecast { config } => {
            let mut job: ForecastJob = load_config(&config)?;
            apply_budget_env(&mut job.scar)?;
            let (_, text) = cmd_forecast(&job, Some(&config))?;
            print!("{text}");
        }
        Command::Lorenz { config, out } => {
            let mut job: LorenzJob = match &config {
                Some(p) => load_config(p)?,
                None => LorenzJob::default(),
            };
            let base = match out {
                Some(o) => {
                    job.output_dir = o;
                    None
                }
                None => config.as_deref(),
            };
            let (_, text) = cmd_lorenz(&job, base)?;
            print!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
