use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::{kalman_update, FilterState, Propagator};
use crate::armodel::{complex_normal, ArModel, TimeSeries};
use crate::error::{Error, Result};
use crate::num::{Real, C};

/// Analysis cycles excluded from the error averages.
pub const SPIN_UP_CYCLES: usize = 10;
/// Shortest run accepted by [`run_kalman`].
pub const MIN_CYCLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkillReport {
    pub prior_rmse: f64,
    pub posterior_rmse: f64,
    pub diverged: bool,
    pub cycles: usize,
    /// `(lead time, PC)` pairs, when a forecast experiment produced them.
    pub pattern_correlation_curve: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackRow {
    pub t: f64,
    pub truth_re: f64,
    pub truth_im: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub prior_var: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KalmanRun {
    pub report: SkillReport,
    pub track: Vec<TrackRow>,
}

/// Filter `truth` observed every `n` steps with complex Gaussian noise of
/// variance `r`. The model runs on anomalies about its mean offset. A
/// non-finite state ends the run and reports infinite errors.
pub fn run_kalman<T: Real>(model: &ArModel<T>, truth: &TimeSeries<T>, n: usize, r: T, seed: u64) -> Result<KalmanRun> {
    let dt = model.dt().as_f64();
    if (truth.dt().as_f64() - dt).abs() > 1e-9 * dt {
        return Err(Error::InvalidArgument(format!("model dt {} differs from truth dt {}", dt, truth.dt())));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("observation interval must be >= 1".into()));
    }
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument(format!("observation variance must be positive, got {r}")));
    }
    let p = model.order();
    let offset = model.mean_offset();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = truth.values();
    let observe = |k: usize, rng: &mut ChaCha8Rng| values[k] + complex_normal(rng, r);

    let zero = C::new(T::zero(), T::zero());
    // start from the first p observations when every step is observed
    let (mut state, start) = {
        let energy = truth.anomalies().values().iter().map(|z| z.norm_sqr()).sum::<T>() / T::lit(values.len() as f64);
        let energy = if energy > T::zero() { energy } else { T::one() };
        if n == 1 && values.len() > p {
            let mean: Vec<C<T>> = (0..p).map(|k| observe(k, &mut rng) - offset).collect();
            (FilterState::isotropic(mean, energy), p - 1)
        } else {
            (FilterState::isotropic(vec![zero; p], energy), 0)
        }
    };
    let cycles = (values.len() - 1 - start) / n;
    if cycles < MIN_CYCLES {
        return Err(Error::InvalidArgument(format!("{cycles} analysis cycles; need at least {MIN_CYCLES}")));
    }
    let prop = Propagator::new(model, n)?;
    let mut prior_sq = 0.0;
    let mut post_sq = 0.0;
    let mut counted = 0usize;
    let mut track = Vec::with_capacity(cycles);
    let mut diverged = false;
    for k in 1..=cycles {
        let idx = start + k * n;
        let prior = prop.apply(&state);
        let obs = observe(idx, &mut rng) - offset;
        let Ok((post, _)) = kalman_update(&prior, obs, r) else {
            diverged = true;
            break;
        };
        let u = values[idx];
        let prior_est = prior.observed_mean() + offset;
        let post_est = post.observed_mean() + offset;
        if k > SPIN_UP_CYCLES {
            prior_sq += (prior_est - u).norm_sqr().as_f64();
            post_sq += (post_est - u).norm_sqr().as_f64();
            counted += 1;
        }
        track.push(TrackRow {
            t: truth.time(idx).as_f64(),
            truth_re: u.re.as_f64(),
            truth_im: u.im.as_f64(),
            mean_re: post_est.re.as_f64(),
            mean_im: post_est.im.as_f64(),
            prior_var: prior.observed_variance().as_f64(),
        });
        if !(prior_sq.is_finite() && post_sq.is_finite()) {
            diverged = true;
            break;
        }
        state = post;
    }
    let report = if diverged || counted == 0 {
        SkillReport {
            prior_rmse: f64::INFINITY,
            posterior_rmse: f64::INFINITY,
            diverged: true,
            cycles,
            pattern_correlation_curve: vec![],
        }
    } else {
        SkillReport {
            prior_rmse: (prior_sq / counted as f64).sqrt(),
            posterior_rmse: (post_sq / counted as f64).sqrt(),
            diverged: false,
            cycles,
            pattern_correlation_curve: vec![],
        }
    };
    Ok(KalmanRun { report, track })
}
