//! Library side of the `scar` command: configs, experiment sweeps and the
//! subcommand implementations.

pub mod commands;
pub mod complex;
pub mod config;
pub mod error;
pub mod experiment;

pub use error::{CliError, CliResult};

/// Name of the environment variable capping symbolic elimination time.
pub const BUDGET_ENV: &str = "SCAR_BUDGET_SECS";

/// Apply `SCAR_BUDGET_SECS` to construction options, if set.
pub fn apply_budget_env(opts: &mut scar_core::scar::ScarOptions) -> CliResult<()> {
    if let Ok(v) = std::env::var(BUDGET_ENV) {
        let secs: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{BUDGET_ENV} must be a number of seconds, got {v:?}")))?;
        if !(secs >= 0.0) {
            return Err(CliError::Usage(format!("{BUDGET_ENV} must be nonnegative, got {secs}")));
        }
        opts.budget.max_seconds = Some(secs);
    }
    Ok(())
}
