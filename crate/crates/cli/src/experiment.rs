//! Filtering sweeps over (model, dt, n, R, seed) grids.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use scar_core::armodel::{constrained_yule_walker_fit, msm_parameters, yule_walker_fit, ArModel, TimeSeries};
use scar_core::filter::{run_kalman, write_results, write_track, ResultRow};
use scar_core::scar::{scar3_model, scar_certificate, ScarCertificate, ScarOptions};
use scar_core::signals::{
    equilibrium_stats, fourier_mode, integrate_lorenz96, load_timeseries, regression_msm, simulate_ou, Lorenz96Config, SeriesFormat,
};
use scar_core::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::complex::{parse_complex, ComplexValue};
use crate::config::{create_dir, resolve};
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Yule-Walker fit of order `p`.
    ArP { p: usize },
    /// Yule-Walker fit of order `p` with both consistency equalities.
    CarP { p: usize },
    /// Yule-Walker fit of order 3.
    Ar3,
    /// Algebraic construction from `λ` and `σ`.
    Scar3,
}

impl ModelSpec {
    pub fn tag(&self) -> String {
        match self {
            ModelSpec::ArP { p } => format!("AR-{p}"),
            ModelSpec::CarP { p } => format!("CAR-{p}"),
            ModelSpec::Ar3 => "AR-3".into(),
            ModelSpec::Scar3 => "SCAR-3".into(),
        }
    }

    fn needs_lambda(&self) -> bool {
        matches!(self, ModelSpec::CarP { .. } | ModelSpec::Scar3)
    }
}

/// Where `λ` comes from: a fixed value, or mean-stochastic-model statistics
/// of the training signal at the smallest step, either from the correlation
/// time (`"measured"`) or from a lag-one regression (`"regression"`).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum LambdaSpec {
    #[default]
    Measured,
    Regression,
    Given(Complex64),
}

impl LambdaSpec {
    /// `(λ, σ)` for a training record; `σ` always comes from its energy.
    pub fn resolve(&self, training: &TimeSeries<f64>) -> CliResult<(Complex64, f64)> {
        Ok(match self {
            LambdaSpec::Given(l) => {
                let energy = equilibrium_stats(training, Some(0.0))?.energy;
                msm_parameters(energy, -Complex64::new(1.0, 0.0) / *l)?
            }
            LambdaSpec::Measured => equilibrium_stats(training, None)?.msm()?,
            LambdaSpec::Regression => regression_msm(training)?,
        })
    }
}

impl<'de> Deserialize<'de> for LambdaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair([f64; 2]),
            Real(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Pair([re, im]) => Ok(LambdaSpec::Given(Complex64::new(re, im))),
            Raw::Real(re) => Ok(LambdaSpec::Given(Complex64::new(re, 0.0))),
            Raw::Text(t) if t.eq_ignore_ascii_case("measured") => Ok(LambdaSpec::Measured),
            Raw::Text(t) if t.eq_ignore_ascii_case("regression") => Ok(LambdaSpec::Regression),
            Raw::Text(t) => parse_complex(&t).map(LambdaSpec::Given).map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for LambdaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LambdaSpec::Measured => s.serialize_str("measured"),
            LambdaSpec::Regression => s.serialize_str("regression"),
            LambdaSpec::Given(z) => ComplexValue(*z).serialize(s),
        }
    }
}

fn default_forcing() -> f64 {
    6.0
}
fn default_dimension() -> usize {
    40
}
fn default_spin_up() -> f64 {
    100.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TruthSource {
    /// One Fourier mode of a Lorenz-96 trajectory integrated at each step.
    Lorenz96 {
        mode: usize,
        #[serde(default = "default_forcing")]
        forcing: f64,
        #[serde(default = "default_dimension")]
        dimension: usize,
        #[serde(default = "default_spin_up")]
        spin_up: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Exactly discretized Ornstein-Uhlenbeck process.
    Ou {
        lambda: ComplexValue,
        sigma: f64,
        #[serde(default)]
        seed: u64,
    },
    /// A recorded series, subsampled to each step. Fits train on the same
    /// record.
    File {
        path: PathBuf,
        #[serde(default)]
        format: SeriesFormat,
    },
}

fn default_truth_length() -> usize {
    20_000
}
fn default_output() -> PathBuf {
    PathBuf::from("sweep-out")
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub lambda: LambdaSpec,
    /// Noise amplitude of SCAR-3; from MSM statistics when absent.
    #[serde(default)]
    pub sigma: Option<f64>,
    pub dts: Vec<f64>,
    pub ns: Vec<usize>,
    pub r_fractions: Vec<f64>,
    pub seeds: Vec<u64>,
    pub truth: TruthSource,
    #[serde(default = "default_truth_length")]
    pub truth_length: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_true")]
    pub write_tracks: bool,
    #[serde(default)]
    pub scar: ScarOptions,
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        let fail = |m: String| Err(CliError::Usage(m));
        if self.models.is_empty() {
            return fail("experiment needs at least one model".into());
        }
        if self.dts.is_empty() || self.dts.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return fail(format!("dt grid must be nonempty and positive: {:?}", self.dts));
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            return fail(format!("observation intervals must be >= 1: {:?}", self.ns));
        }
        if self.r_fractions.is_empty() || self.r_fractions.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return fail(format!("R fractions must be positive: {:?}", self.r_fractions));
        }
        if self.seeds.is_empty() {
            return fail("need at least one seed".into());
        }
        for m in &self.models {
            match m {
                ModelSpec::ArP { p } | ModelSpec::CarP { p } if *p == 0 => return fail(format!("{}: p must be >= 1", m.tag())),
                ModelSpec::CarP { p } if *p < 3 => return fail(format!("{}: constrained fit needs p >= 3", m.tag())),
                _ => {}
            }
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0) {
                return fail(format!("sigma must be positive, got {s}"));
            }
        }
        if self.truth_length < 200 {
            return fail(format!("truth length {} too short", self.truth_length));
        }
        Ok(())
    }
}

/// Truth and an independent training record at one step.
pub struct Signals {
    pub dt: f64,
    pub truth: TimeSeries<f64>,
    pub training: TimeSeries<f64>,
    pub energy: f64,
}

fn lorenz_mode(mode: usize, forcing: f64, dimension: usize, spin_up: f64, seed: u64, dt: f64, len: usize) -> CliResult<TimeSeries<f64>> {
    let cfg = Lorenz96Config {
        dimension,
        forcing,
        sample_dt: dt,
        step: None,
        spin_up,
        duration: dt * (len - 1) as f64,
        seed,
        initial: None,
    };
    let traj = integrate_lorenz96(&cfg)?;
    let s = fourier_mode(&traj, mode)?;
    Ok(s.slice(0, len.min(s.len()))?)
}

fn file_at(series: &TimeSeries<f64>, dt: f64, len: usize) -> CliResult<TimeSeries<f64>> {
    let ratio = dt / series.dt();
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > 1e-6 * ratio {
        return Err(CliError::Usage(format!("dt {dt} is not a multiple of the file step {}", series.dt())));
    }
    let s = series.subsample(k as usize)?;
    Ok(s.slice(0, len.min(s.len()))?)
}

pub fn generate_signals(cfg: &ExperimentConfig, config_path: Option<&Path>, dt: f64) -> CliResult<Signals> {
    let len = cfg.truth_length;
    let (truth, training) = match &cfg.truth {
        TruthSource::Lorenz96 { mode, forcing, dimension, spin_up, seed } => (
            lorenz_mode(*mode, *forcing, *dimension, *spin_up, *seed, dt, len)?,
            lorenz_mode(*mode, *forcing, *dimension, *spin_up, seed.wrapping_add(1), dt, len)?,
        ),
        TruthSource::Ou { lambda, sigma, seed } => (
            simulate_ou(lambda.0, *sigma, dt, len, *seed)?,
            simulate_ou(lambda.0, *sigma, dt, len, seed.wrapping_add(1))?,
        ),
        TruthSource::File { path, format } => {
            let p = config_path.map(|c| resolve(c, path)).unwrap_or_else(|| path.clone());
            let s = load_timeseries(&p, *format).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
            let s = file_at(&s, dt, len)?;
            (s.clone(), s)
        }
    };
    let energy = equilibrium_stats(&truth, Some(0.0))?.energy;
    Ok(Signals { dt, truth, training, energy })
}

pub fn build_model(
    spec: &ModelSpec,
    sig: &Signals,
    lambda: Option<Complex64>,
    sigma: f64,
    cert: Option<&ScarCertificate>,
) -> CliResult<ArModel<f64>> {
    let need = || CliError::Runtime(format!("{} needs lambda", spec.tag()));
    Ok(match spec {
        ModelSpec::ArP { p } => yule_walker_fit(&sig.training, *p)?.0,
        ModelSpec::Ar3 => yule_walker_fit(&sig.training, 3)?.0,
        ModelSpec::CarP { p } => constrained_yule_walker_fit(&sig.training, *p, lambda.ok_or_else(need)?)?.0,
        ModelSpec::Scar3 => {
            let cert = cert.ok_or_else(need)?;
            scar3_model(cert, sigma, sig.dt)?.with_mean_offset(sig.training.mean())
        }
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub cells: usize,
    pub diverged: usize,
    /// Cells whose posterior RMSE is at least the observation error `√R`.
    pub above_obs_error: usize,
    pub worst_posterior_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    /// Energy of the truth at each step.
    pub energies: Vec<(f64, f64)>,
    pub lambda: Option<Complex64>,
    pub sigma: Option<f64>,
    pub dt_hat: Option<f64>,
    pub summary: BTreeMap<String, ModelSummary>,
    pub notes: Vec<String>,
}

impl SweepOutcome {
    /// Observation-error ratio `posterior RMSE / √(R_fraction ℰ)` per row.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                let e = self.energies.iter().find(|(d, _)| *d == r.dt).map(|x| x.1).unwrap_or(f64::NAN);
                r.posterior_rmse / (r.r_fraction * e).sqrt()
            })
            .collect()
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        if let Some(l) = self.lambda {
            out += &format!("lambda = {}\n", crate::complex::format_complex(l, 4));
        }
        if let Some(d) = self.dt_hat {
            out += &format!("dt_hat = {d:.4}\n");
        }
        for (tag, s) in &self.summary {
            out += &format!(
                "{tag:>8}: {} cells, {} diverged, {} at or above obs error, worst posterior/obs {:.3}\n",
                s.cells, s.diverged, s.above_obs_error, s.worst_posterior_ratio
            );
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out
    }
}

fn cell_seed(seed: u64, dt_idx: usize, n: usize, r_idx: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add((dt_idx as u64) << 40).wrapping_add((n as u64) << 20).wrapping_add(r_idx as u64)
}

/// Run the whole grid. Results are written to `output_dir/results.csv` and,
/// when enabled, one track file per cell under `output_dir/tracks`.
pub fn run_sweep(cfg: &ExperimentConfig, config_path: Option<&Path>) -> CliResult<SweepOutcome> {
    cfg.validate()?;
    let out_dir = config_path.map(|c| resolve(c, &cfg.output_dir)).unwrap_or_else(|| cfg.output_dir.clone());
    create_dir(&out_dir)?;
    let tracks_dir = out_dir.join("tracks");
    if cfg.write_tracks {
        create_dir(&tracks_dir)?;
    }
    let signals: Vec<Signals> =
        cfg.dts.par_iter().map(|&dt| generate_signals(cfg, config_path, dt)).collect::<CliResult<_>>()?;
    let mut notes = Vec::new();
    let needs_lambda = cfg.models.iter().any(ModelSpec::needs_lambda);
    let needs_scar = cfg.models.contains(&ModelSpec::Scar3);
    let smallest = signals.iter().min_by(|a, b| a.dt.total_cmp(&b.dt)).expect("nonempty dt grid");

    let (lambda, measured_sigma) = if needs_lambda || (needs_scar && cfg.sigma.is_none()) {
        let (l, s) = cfg.lambda.resolve(&smallest.training)?;
        if cfg.lambda != LambdaSpec::Given(l) {
            notes.push(format!("lambda estimated at dt = {}", smallest.dt));
        }
        (Some(l), Some(s))
    } else {
        (None, None)
    };
    let sigma = cfg.sigma.or(measured_sigma);
    let cert = match (needs_scar, lambda) {
        (true, Some(l)) => match scar_certificate(l, &cfg.scar) {
            Ok(c) => Some(c),
            Err(e) => {
                notes.push(format!("SCAR-3 construction failed: {e}"));
                None
            }
        },
        _ => None,
    };

    // (model, dt) builds are shared by every (n, R, seed) cell
    let builds: Vec<Vec<Result<ArModel<f64>, String>>> = cfg
        .models
        .par_iter()
        .map(|spec| {
            signals
                .iter()
                .map(|sig| build_model(spec, sig, lambda, sigma.unwrap_or(1.0), cert.as_ref()).map_err(|e| e.to_string()))
                .collect()
        })
        .collect();
    for (spec, per_dt) in cfg.models.iter().zip(&builds) {
        for (sig, b) in signals.iter().zip(per_dt) {
            if let Err(e) = b {
                notes.push(format!("{} at dt = {}: {e}", spec.tag(), sig.dt));
            }
        }
    }

    let mut cells = Vec::new();
    for (mi, _) in cfg.models.iter().enumerate() {
        for di in 0..signals.len() {
            for &n in &cfg.ns {
                for (ri, _) in cfg.r_fractions.iter().enumerate() {
                    for &seed in &cfg.seeds {
                        cells.push((mi, di, n, ri, seed));
                    }
                }
            }
        }
    }
    let rows: Vec<ResultRow> = cells
        .par_iter()
        .map(|&(mi, di, n, ri, seed)| {
            let spec = &cfg.models[mi];
            let sig = &signals[di];
            let frac = cfg.r_fractions[ri];
            let mut row = ResultRow {
                model_tag: spec.tag(),
                dt: sig.dt,
                n,
                r_fraction: frac,
                prior_rmse: f64::INFINITY,
                posterior_rmse: f64::INFINITY,
                diverged: true,
                seed,
            };
            let Ok(model) = &builds[mi][di] else {
                return Ok(row);
            };
            match run_kalman(model, &sig.truth, n, frac * sig.energy, cell_seed(seed, di, n, ri)) {
                Ok(run) => {
                    row.prior_rmse = run.report.prior_rmse;
                    row.posterior_rmse = run.report.posterior_rmse;
                    row.diverged = run.report.diverged;
                    if cfg.write_tracks {
                        let name = format!("{}_dt{:.6}_n{}_R{}_s{}.csv", row.model_tag, sig.dt, n, frac, seed);
                        write_track(&tracks_dir.join(name), &run.track)?;
                    }
                }
                Err(scar_core::Error::InvalidArgument(m)) => return Err(CliError::Usage(m)),
                Err(_) => {}
            }
            Ok(row)
        })
        .collect::<CliResult<_>>()?;
    write_results(&out_dir.join("results.csv"), &rows)?;

    let energies: Vec<(f64, f64)> = signals.iter().map(|s| (s.dt, s.energy)).collect();
    let mut outcome = SweepOutcome {
        rows,
        energies,
        lambda,
        sigma,
        dt_hat: cert.as_ref().map(|c| c.dt_hat),
        summary: BTreeMap::new(),
        notes,
    };
    let ratios = outcome.ratios();
    for (row, ratio) in outcome.rows.iter().zip(ratios) {
        let s = outcome.summary.entry(row.model_tag.clone()).or_default();
        s.cells += 1;
        if row.diverged {
            s.diverged += 1;
        }
        if !(ratio < 1.0) {
            s.above_obs_error += 1;
        }
        if ratio > s.worst_posterior_ratio || ratio.is_nan() {
            s.worst_posterior_ratio = ratio;
        }
    }
    if let Some(c) = &cert {
        crate::config::write_text(&out_dir.join("certificate.json"), &c.to_json()?)?;
    }
    crate::config::write_text(&out_dir.join("summary.json"), &serde_json::to_string_pretty(&outcome.summary)?)?;
    Ok(outcome)
}
