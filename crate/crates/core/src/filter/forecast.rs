use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::enkf::{adaptive_noise_estimate, enkf_step, AdaptiveNoise, Ensemble, MIN_INNOVATIONS};
use super::metrics::{pattern_correlation_curve, rmse_values};
use crate::armodel::{ArModel, TimeSeries};
use crate::error::{Error, Result};
use crate::num::C;

/// How the observation variance is re-estimated during assimilation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NoiseMode {
    /// Keep the initial value.
    Fixed,
    /// Batch estimate over the training window, iterated to a fixed point
    /// (each pass reruns the window with the previous estimate), then held.
    Batch,
    /// Exponentially weighted running estimate.
    Forgetting { factor: f64 },
}

impl Default for NoiseMode {
    fn default() -> Self {
        NoiseMode::Forgetting { factor: 0.99 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForecastConfig {
    pub ensemble_size: usize,
    /// Samples assimilated before forecasts are verified.
    pub train_len: usize,
    /// Longest lead, in model steps.
    pub max_lead: usize,
    pub noise_mode: NoiseMode,
    pub initial_r: f64,
    pub inflation: f64,
    pub seed: u64,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        ForecastConfig {
            ensemble_size: 50,
            train_len: 1000,
            max_lead: 30,
            noise_mode: NoiseMode::default(),
            initial_r: 0.1,
            inflation: 1.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastTrackRow {
    pub t: f64,
    pub obs_re: f64,
    pub obs_im: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub prior_var: f64,
    pub r_estimate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForecastResult {
    /// `(lead steps, lead time, PC)`.
    pub pc_curve: Vec<(usize, f64, f64)>,
    /// Final observation-variance estimate.
    pub r_estimate: f64,
    /// Estimate averaged over the verification window; steadier than the
    /// final value under exponential forgetting.
    pub r_estimate_mean: f64,
    /// RMSE of the analysis mean against the verification series over the
    /// verification window.
    pub analysis_rmse: f64,
    pub track: Vec<ForecastTrackRow>,
}

/// Most training-window passes of [`NoiseMode::Batch`].
pub const BATCH_PASSES: usize = 25;
/// Relative change at which the batch iteration stops.
pub const BATCH_TOL: f64 = 1e-3;

/// Rerun the training window until the batch estimate settles.
fn batch_fixed_point(model: &ArModel<f64>, obs: &[C<f64>], spread: f64, cfg: &ForecastConfig) -> Result<f64> {
    let p = model.order();
    let mut r = cfg.initial_r;
    for _ in 0..BATCH_PASSES {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut ens = Ensemble::sample(&obs[..p], spread, cfg.ensemble_size, &mut rng)?;
        let mut innovations = Vec::with_capacity(cfg.train_len - p);
        let mut prior_vars = Vec::with_capacity(cfg.train_len - p);
        for &v in &obs[p..cfg.train_len] {
            let (next, step) = enkf_step(&ens, model, v, r, 1, cfg.inflation, &mut rng)?;
            ens = next;
            innovations.push(step.innovation);
            prior_vars.push(step.prior_variance);
        }
        let next = adaptive_noise_estimate(&innovations, &prior_vars)?;
        let done = (next - r).abs() <= BATCH_TOL * r;
        r = next;
        if done {
            break;
        }
    }
    Ok(r)
}

/// Assimilate every sample of `observations` with the ensemble transform
/// filter, estimating the observation variance from innovations, and from
/// index `train_len` on issue mean forecasts up to `max_lead` steps ahead.
/// Forecasts are scored against `verification` (default: the observations).
pub fn ensemble_forecast(
    model: &ArModel<f64>,
    observations: &TimeSeries<f64>,
    verification: Option<&TimeSeries<f64>>,
    cfg: &ForecastConfig,
) -> Result<ForecastResult> {
    let dt = model.dt();
    if (observations.dt() - dt).abs() > 1e-9 * dt {
        return Err(Error::InvalidArgument(format!("model dt {dt} differs from series dt {}", observations.dt())));
    }
    let verif = verification.unwrap_or(observations);
    if verif.len() != observations.len() {
        return Err(Error::LengthMismatch(verif.len(), observations.len()));
    }
    let p = model.order();
    let len = observations.len();
    if cfg.train_len < p + MIN_INNOVATIONS || cfg.train_len + cfg.max_lead >= len {
        return Err(Error::InvalidArgument(format!(
            "window exceeds data: train {} + lead {} with {} samples (order {p})",
            cfg.train_len, cfg.max_lead, len
        )));
    }
    if !(cfg.initial_r > 0.0) {
        return Err(Error::InvalidArgument("initial R must be positive".into()));
    }
    let offset = model.mean_offset();
    let obs: Vec<C<f64>> = observations.values().iter().map(|v| v - offset).collect();
    let energy = observations.anomalies().values().iter().map(|z| z.norm_sqr()).sum::<f64>() / len as f64;
    let spread = energy.max(cfg.initial_r);
    let mut r_cur = match cfg.noise_mode {
        NoiseMode::Batch => batch_fixed_point(model, &obs, spread, cfg)?,
        _ => cfg.initial_r,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ens = Ensemble::sample(&obs[..p], spread, cfg.ensemble_size, &mut rng)?;

    let f = model.companion();
    let mut running = match cfg.noise_mode {
        NoiseMode::Forgetting { factor } => Some(AdaptiveNoise::new(factor)),
        _ => None,
    };
    let n_verify = len - cfg.train_len;
    let mut forecasts: Vec<Vec<Option<C<f64>>>> = vec![vec![None; n_verify]; cfg.max_lead + 1];
    let mut analysis = Vec::new();
    let mut track = Vec::with_capacity(len - p);

    for k in p..len {
        let (next, step) = enkf_step(&ens, model, obs[k], r_cur, 1, cfg.inflation, &mut rng)?;
        ens = next;
        if let Some(tracker) = &mut running {
            tracker.push(step.innovation, step.prior_variance);
            if k + 1 - p >= MIN_INNOVATIONS {
                r_cur = tracker.estimate().unwrap_or(r_cur);
            }
        }
        let mean = ens.mean();
        track.push(ForecastTrackRow {
            t: observations.time(k),
            obs_re: observations.values()[k].re,
            obs_im: observations.values()[k].im,
            mean_re: (mean[p - 1] + offset).re,
            mean_im: (mean[p - 1] + offset).im,
            prior_var: step.prior_variance,
            r_estimate: r_cur,
        });
        if k >= cfg.train_len {
            let i = k - cfg.train_len;
            analysis.push(mean[p - 1] + offset);
            let mut x = mean;
            for fc in forecasts.iter_mut() {
                fc[i] = Some(x[p - 1] + offset);
                x = f.mul_vec(&x);
                x[p - 1] += model.forcing();
            }
        }
    }
    let v = &verif.values()[cfg.train_len..];
    let pc_curve = pattern_correlation_curve(&forecasts, v)?
        .into_iter()
        .map(|(lead, pc)| (lead, lead as f64 * dt, pc))
        .collect();
    let tail = &track[cfg.train_len - p..];
    let r_estimate_mean = tail.iter().map(|row| row.r_estimate).sum::<f64>() / tail.len() as f64;
    Ok(ForecastResult { pc_curve, r_estimate: r_cur, r_estimate_mean, analysis_rmse: rmse_values(&analysis, v)?, track })
}
