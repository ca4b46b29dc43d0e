use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scar_core::armodel::{aic_select, complex_normal, constrained_yule_walker_fit, yule_walker_fit, ArModel, FitDiagnostics};
use scar_core::filter::{ensemble_forecast, run_kalman, write_rows, write_track, ForecastConfig, ForecastResult};
use scar_core::scar::{construct_scar3, scar3_model, scar_certificate, ScarCertificate, ScarOptions};
use scar_core::signals::{
    equilibrium_stats, fourier_mode, integrate_lorenz96, load_timeseries, save_multiseries, save_timeseries,
    simulate_ou, EquilibriumStats, Lorenz96Config, SeriesFormat, DAY_DT,
};
use scar_core::{Complex64, Series};
use serde::{Deserialize, Serialize};

use crate::complex::{format_complex, ComplexValue};
use crate::config::{create_dir, resolve, write_text};
use crate::error::{CliError, CliResult};
use crate::experiment::LambdaSpec;

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Lines printed after a construction, four decimals as in the usual
/// presentation `a_j = (…) δt`.
pub fn format_certificate(cert: &ScarCertificate) -> CliResult<String> {
    let mut out = String::new();
    let per_dt = cert.coefficients_per_dt()?;
    for (j, a) in per_dt.iter().enumerate() {
        writeln!(out, "a{} = ({}) dt", j + 1, format_complex(*a, 4)).unwrap();
    }
    writeln!(out, "dt_hat = {:.4}", cert.dt_hat).unwrap();
    writeln!(out, "s_hat = {}", format_complex(cert.s_hat, 6)).unwrap();
    writeln!(out, "search path: {:?}", cert.search_path).unwrap();
    Ok(out)
}

pub struct ScarArgs {
    pub lambda: Complex64,
    pub sigma: f64,
    pub dt: Option<f64>,
    pub out_dir: PathBuf,
    pub options: ScarOptions,
    pub timestamp: bool,
}

/// Certificate and model JSON files plus a printed summary.
pub fn cmd_scar(args: &ScarArgs) -> CliResult<(ScarCertificate, ArModel<f64>, String)> {
    if !(args.sigma > 0.0) {
        return Err(CliError::Usage(format!("sigma must be positive, got {}", args.sigma)));
    }
    let (model, mut cert) = construct_scar3(args.lambda, args.sigma, args.dt, &args.options)?;
    if args.timestamp {
        cert.created = Some(timestamp());
    }
    create_dir(&args.out_dir)?;
    write_text(&args.out_dir.join("certificate.json"), &cert.to_json()?)?;
    write_text(&args.out_dir.join("model.json"), &model.to_json()?)?;
    let mut text = format_certificate(&cert)?;
    writeln!(text, "model dt = {}", model.dt()).unwrap();
    Ok((cert, model, text))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitMethod {
    Yw,
    Cyw,
}

pub struct FitArgs {
    pub series: PathBuf,
    pub format: SeriesFormat,
    pub method: FitMethod,
    pub p: usize,
    pub lambda: Option<Complex64>,
    pub aic: Option<usize>,
    pub out: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub p: usize,
    pub diagnostics: FitDiagnostics,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aic_table: Vec<(usize, Option<f64>)>,
}

pub fn cmd_fit(args: &FitArgs) -> CliResult<(ArModel<f64>, FitReport, String)> {
    if args.method == FitMethod::Cyw && args.lambda.is_none() {
        return Err(CliError::Usage("cyw needs --lambda".into()));
    }
    let series = load_timeseries(&args.series, args.format)?;
    let mut text = String::new();
    let (p, table) = match args.aic {
        Some(pmax) => {
            let sel = aic_select(&series, pmax)?;
            writeln!(text, "   p  F(p)").unwrap();
            for (p, f) in &sel.table {
                match f {
                    Some(v) => writeln!(text, "{p:>4}  {v:.6e}").unwrap(),
                    None => writeln!(text, "{p:>4}  failed").unwrap(),
                }
            }
            writeln!(text, "selected p = {}", sel.chosen).unwrap();
            (sel.chosen, sel.table)
        }
        None => (args.p, vec![]),
    };
    let (model, diagnostics) = match args.method {
        FitMethod::Yw => yule_walker_fit(&series, p)?,
        FitMethod::Cyw => constrained_yule_walker_fit(&series, p, args.lambda.expect("checked"))?,
    };
    for (j, a) in model.coeffs().iter().enumerate() {
        writeln!(text, "a{} = {}", j + 1, format_complex(*a, 6)).unwrap();
    }
    writeln!(text, "Q = {:.6e}", model.noise_variance()).unwrap();
    writeln!(text, "stable = {}", model.is_stable().stable).unwrap();
    let report = FitReport { p, diagnostics, aic_table: table };
    write_text(&args.out, &model.to_json()?)?;
    let diag_path = args.out.with_extension("diagnostics.json");
    write_text(&diag_path, &serde_json::to_string_pretty(&report)?)?;
    Ok((model, report, text))
}

pub struct FilterArgs {
    pub model: PathBuf,
    pub truth: PathBuf,
    pub format: SeriesFormat,
    pub n: usize,
    /// Observation variance as a fraction of the truth energy.
    pub r_fraction: f64,
    pub seed: u64,
    pub track: Option<PathBuf>,
}

pub fn cmd_filter(args: &FilterArgs) -> CliResult<String> {
    if !(args.r_fraction > 0.0) {
        return Err(CliError::Usage(format!("R fraction must be positive, got {}", args.r_fraction)));
    }
    let text = std::fs::read_to_string(&args.model).map_err(CliError::io(format!("reading {}", args.model.display())))?;
    let model = ArModel::<f64>::from_json(&text)?;
    let truth = load_timeseries(&args.truth, args.format)?;
    let energy = equilibrium_stats(&truth, Some(0.0))?.energy;
    let r = args.r_fraction * energy;
    let run = run_kalman(&model, &truth, args.n, r, args.seed)?;
    if let Some(path) = &args.track {
        write_track(path, &run.track)?;
    }
    let mut report = serde_json::to_value(&run.report)?;
    report["observation_error"] = serde_json::json!(r.sqrt());
    report["energy"] = serde_json::json!(energy);
    Ok(serde_json::to_string_pretty(&report)?)
}

fn default_output() -> PathBuf {
    PathBuf::from("forecast-out")
}

fn default_models() -> Vec<ForecastModel> {
    vec![ForecastModel::Scar3, ForecastModel::Ar3]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastModel {
    Scar3,
    Ar3,
}

impl ForecastModel {
    pub fn tag(self) -> &'static str {
        match self {
            ForecastModel::Scar3 => "SCAR-3",
            ForecastModel::Ar3 => "AR-3",
        }
    }
}

/// Input record of a forecast experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ForecastData {
    /// Observed bivariate record (`t,re,im` or `date,rmm1,rmm2`), optionally
    /// with a clean record to score against.
    File {
        path: PathBuf,
        #[serde(default)]
        format: SeriesFormat,
        #[serde(default)]
        verification: Option<PathBuf>,
    },
    /// Ornstein-Uhlenbeck signal observed with additive complex noise of
    /// variance `observation_noise`; forecasts are scored against the noisy
    /// record, as with real data.
    Synthetic {
        lambda: ComplexValue,
        sigma: f64,
        observation_noise: f64,
        length: usize,
        #[serde(default = "default_day")]
        dt: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn default_day() -> f64 {
    DAY_DT
}

/// Noisy observations of an OU signal; returns `(observations, truth)`.
pub fn synthetic_record(lambda: Complex64, sigma: f64, noise: f64, length: usize, dt: f64, seed: u64) -> CliResult<(Series, Series)> {
    if !(noise >= 0.0) {
        return Err(CliError::Usage(format!("observation noise must be nonnegative, got {noise}")));
    }
    let truth = simulate_ou(lambda, sigma, dt, length, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9));
    let values = truth.values().iter().map(|u| u + complex_normal(&mut rng, noise)).collect();
    let obs = Series::new(values, truth.dt(), truth.t0())?;
    Ok((obs, truth))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastJob {
    pub data: ForecastData,
    #[serde(default = "default_models")]
    pub models: Vec<ForecastModel>,
    #[serde(default)]
    pub lambda: LambdaSpec,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub enkf: ForecastConfig,
    #[serde(default)]
    pub scar: ScarOptions,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug)]
pub struct ForecastOutcome {
    pub lambda: Complex64,
    pub sigma: f64,
    pub dt_hat: Option<f64>,
    pub results: Vec<(ForecastModel, ForecastResult)>,
}

#[derive(Serialize)]
struct PcRow {
    lead_steps: usize,
    lead_time: f64,
    model_tag: &'static str,
    pc: f64,
}

/// Assimilate the training window with each model, forecast over the
/// verification window and write PC curves and analysis tracks.
pub fn cmd_forecast(job: &ForecastJob, config_path: Option<&Path>) -> CliResult<(ForecastOutcome, String)> {
    if job.models.is_empty() {
        return Err(CliError::Usage("forecast needs at least one model".into()));
    }
    let at = |p: &Path| config_path.map(|c| resolve(c, p)).unwrap_or_else(|| p.to_path_buf());
    let (obs, verif) = match &job.data {
        ForecastData::File { path, format, verification } => {
            let obs = load_timeseries(&at(path), *format)?;
            let verif = match verification {
                Some(p) => Some(load_timeseries(&at(p), *format)?),
                None => None,
            };
            (obs, verif)
        }
        ForecastData::Synthetic { lambda, sigma, observation_noise, length, dt, seed } => {
            (synthetic_record(lambda.0, *sigma, *observation_noise, *length, *dt, *seed)?.0, None)
        }
    };
    let train = obs.slice(0, job.enkf.train_len.min(obs.len()))?;
    let (lambda, sigma) = job.lambda.resolve(&train)?;
    let sigma = job.sigma.unwrap_or(sigma);
    let mut dt_hat = None;
    let mut results = Vec::new();
    for &m in &job.models {
        let model = match m {
            ForecastModel::Ar3 => yule_walker_fit(&train, 3)?.0,
            ForecastModel::Scar3 => {
                let cert = scar_certificate(lambda, &job.scar)?;
                dt_hat = Some(cert.dt_hat);
                scar3_model(&cert, sigma, obs.dt())?.with_mean_offset(train.mean())
            }
        };
        results.push((m, ensemble_forecast(&model, &obs, verif.as_ref(), &job.enkf)?));
    }
    let out_dir = at(&job.output_dir);
    create_dir(&out_dir)?;
    let mut pc_rows = Vec::new();
    let mut text = String::new();
    writeln!(text, "lambda = {}, sigma = {:.4}", format_complex(lambda, 4), sigma).unwrap();
    if let Some(d) = dt_hat {
        writeln!(text, "dt_hat = {d:.4}").unwrap();
    }
    for (m, r) in &results {
        for &(lead, t, pc) in &r.pc_curve {
            pc_rows.push(PcRow { lead_steps: lead, lead_time: t, model_tag: m.tag(), pc });
        }
        let name = format!("track_{}.csv", m.tag());
        write_rows(&out_dir.join(name), &r.track)?;
        let at15 = r.pc_curve.iter().find(|x| x.0 == 15).map(|x| x.2);
        writeln!(
            text,
            "{:>7}: R estimate {:.4} (mean {:.4}), analysis RMSE {:.4}, PC(15) {}",
            m.tag(),
            r.r_estimate,
            r.r_estimate_mean,
            r.analysis_rmse,
            at15.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into())
        )
        .unwrap();
    }
    write_rows(&out_dir.join("pattern_correlation.csv"), &pc_rows)?;
    Ok((ForecastOutcome { lambda, sigma, dt_hat, results }, text))
}

fn default_modes() -> Vec<usize> {
    vec![1, 8]
}
fn default_lorenz_out() -> PathBuf {
    PathBuf::from("lorenz-out")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorenzJob {
    #[serde(default)]
    pub system: Lorenz96Config,
    #[serde(default = "default_modes")]
    pub modes: Vec<usize>,
    /// Correlation-integral limit; first lag with `|acf| < 0.01` when absent.
    #[serde(default)]
    pub max_lag: Option<f64>,
    #[serde(default = "default_lorenz_out")]
    pub output_dir: PathBuf,
    #[serde(default = "default_true")]
    pub write_trajectory: bool,
}

fn default_true() -> bool {
    true
}

impl Default for LorenzJob {
    fn default() -> Self {
        LorenzJob {
            system: Lorenz96Config::default(),
            modes: default_modes(),
            max_lag: None,
            output_dir: default_lorenz_out(),
            write_trajectory: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeReport {
    pub mode: usize,
    #[serde(flatten)]
    pub stats: EquilibriumStats,
    pub lambda: Option<Complex64>,
    pub sigma: Option<f64>,
}

#[derive(Serialize)]
struct AcfRow {
    lag: usize,
    tau: f64,
    re: f64,
    im: f64,
    abs: f64,
}

pub fn cmd_lorenz(job: &LorenzJob, config_path: Option<&Path>) -> CliResult<(Vec<ModeReport>, String)> {
    let traj = integrate_lorenz96(&job.system)?;
    let out_dir = config_path.map(|c| resolve(c, &job.output_dir)).unwrap_or_else(|| job.output_dir.clone());
    create_dir(&out_dir)?;
    if job.write_trajectory {
        save_multiseries(&traj, &out_dir.join("trajectory.csv"))?;
    }
    let mut reports = Vec::new();
    let mut text = format!("{} samples, dt = {}, max |x| = {:.3}\n", traj.len(), traj.dt(), traj.max_abs());
    for &k in &job.modes {
        let series: Series = fourier_mode(&traj, k)?;
        save_timeseries(&series, &out_dir.join(format!("mode_{k}.csv")))?;
        let stats = equilibrium_stats(&series, job.max_lag)?;
        let (lambda, sigma) = match stats.msm() {
            Ok((l, s)) => (Some(l), Some(s)),
            Err(_) => (None, None),
        };
        let acf: Vec<AcfRow> = stats
            .acf
            .iter()
            .enumerate()
            .map(|(lag, a)| AcfRow { lag, tau: lag as f64 * stats.dt, re: a.re, im: a.im, abs: a.norm() })
            .collect();
        write_rows(&out_dir.join(format!("acf_mode_{k}.csv")), &acf)?;
        writeln!(
            text,
            "mode {k}: energy {:.4}, T = {}, lambda = {}, sigma = {}",
            stats.energy,
            format_complex(stats.correlation_time, 4),
            lambda.map(|l| format_complex(l, 4)).unwrap_or_else(|| "n/a".into()),
            sigma.map(|s| format!("{s:.4}")).unwrap_or_else(|| "n/a".into())
        )
        .unwrap();
        for w in &stats.warnings {
            writeln!(text, "  warning: {w}").unwrap();
        }
        let report = ModeReport { mode: k, stats, lambda, sigma };
        write_text(&out_dir.join(format!("stats_mode_{k}.json")), &serde_json::to_string_pretty(&report)?)?;
        reports.push(report);
    }
    Ok((reports, text))
}
