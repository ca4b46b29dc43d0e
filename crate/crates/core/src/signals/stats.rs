use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::armodel::{complex_normal, msm_parameters, TimeSeries};
use crate::error::{Error, Result};
use crate::num::{Real, C};

/// Default cutoff of the correlation-time integral.
pub const ACF_CUTOFF: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumStats {
    /// Variance of the mean-removed series.
    pub energy: f64,
    /// `∫ acf(τ) dτ` up to the integration limit.
    pub correlation_time: C<f64>,
    /// Normalized autocorrelation at lags `0, dt, 2dt, …`.
    pub acf: Vec<C<f64>>,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl EquilibriumStats {
    /// `(λ, σ)` of the matching Ornstein-Uhlenbeck process.
    pub fn msm(&self) -> Result<(C<f64>, f64)> {
        msm_parameters(self.energy, self.correlation_time)
    }
}

fn lagged_covariance<T: Real>(u: &[C<T>], m: usize) -> C<f64> {
    let n = u.len() - m;
    let mut acc = C::new(0.0, 0.0);
    for k in 0..n {
        let a = u[k + m];
        let b = u[k];
        acc += C::new(a.re.as_f64(), a.im.as_f64()) * C::new(b.re.as_f64(), -b.im.as_f64());
    }
    acc / n as f64
}

/// Energy, autocorrelation `E[u(t+τ) ū(t)]/ℰ` and correlation time by the
/// trapezoidal rule. Without `max_lag` the integral stops at the first lag
/// with `|acf| < 0.01`, or at a twentieth of the record.
pub fn equilibrium_stats<T: Real>(series: &TimeSeries<T>, max_lag: Option<f64>) -> Result<EquilibriumStats> {
    let anomalies = series.anomalies();
    let u = anomalies.values();
    let n = u.len();
    let dt = series.dt().as_f64();
    let energy = u.iter().map(|z| z.norm_sqr().as_f64()).sum::<f64>() / n as f64;
    if !(energy > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let mut warnings = Vec::new();
    let limit = match max_lag {
        Some(tau) => {
            if !(tau >= 0.0) {
                return Err(Error::InvalidArgument(format!("max lag must be nonnegative, got {tau}")));
            }
            let m = (tau / dt).round() as usize;
            if m >= n {
                return Err(Error::InvalidArgument(format!("max lag {tau} exceeds the record")));
            }
            Some(m)
        }
        None => None,
    };
    let cap = limit.unwrap_or((n / 20).max(1));
    let mut acf = vec![C::new(1.0, 0.0)];
    for m in 1..=cap {
        let a = lagged_covariance(u, m) / energy;
        acf.push(a);
        if limit.is_none() && a.norm() < ACF_CUTOFF {
            break;
        }
    }
    let m = acf.len() - 1;
    if limit.is_none() && acf[m].norm() >= ACF_CUTOFF {
        warnings.push(format!("autocorrelation still {:.3} at the lag cap {}", acf[m].norm(), m as f64 * dt));
    }
    if n < 20 * m.max(1) {
        warnings.push(format!("series of {n} samples is short for a {m}-lag correlation integral"));
    }
    let sum: C<f64> = acf.iter().sum();
    let correlation_time = (sum - (acf[0] + acf[m]) * 0.5) * dt;
    Ok(EquilibriumStats { energy, correlation_time, acf, dt, warnings })
}

/// Mean stochastic model by lag-one regression: `a = Σ u_{k+1} ū_k / Σ |u_k|²`
/// on anomalies, `λ = ln(a)/dt`, `σ² = 2|Re λ| ℰ`.
pub fn regression_msm<T: Real>(series: &TimeSeries<T>) -> Result<(C<f64>, f64)> {
    let anomalies = series.anomalies();
    let u = anomalies.values();
    if u.len() < 3 {
        return Err(Error::InvalidArgument("need at least three samples".into()));
    }
    let n = u.len() as f64;
    let energy = u.iter().map(|z| z.norm_sqr().as_f64()).sum::<f64>() / n;
    if !(energy > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let head: f64 = u[..u.len() - 1].iter().map(|z| z.norm_sqr().as_f64()).sum();
    let a = lagged_covariance(u, 1) * (u.len() - 1) as f64 / head;
    let lambda = a.ln() / series.dt().as_f64();
    if !(lambda.re < 0.0) {
        return Err(Error::UnstableContinuousDynamics(lambda.re));
    }
    Ok((lambda, (2.0 * lambda.re.abs() * energy).sqrt()))
}

/// Exact discretization of `du = λu dt + σ dW` on a grid of step `dt`,
/// started from the stationary law.
pub fn simulate_ou<T: Real>(lambda: C<T>, sigma: T, dt: T, steps: usize, seed: u64) -> Result<TimeSeries<T>> {
    if !(lambda.re < T::zero()) {
        return Err(Error::UnstableContinuousDynamics(lambda.re.as_f64()));
    }
    if !(sigma >= T::zero()) {
        return Err(Error::InvalidArgument(format!("sigma must be nonnegative, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_re = T::lit(2.0) * lambda.re;
    let stationary = sigma * sigma / -two_re;
    let decay = (lambda * dt).exp();
    let step_var = sigma * sigma * ((two_re * dt).exp() - T::one()) / two_re;
    let mut u = complex_normal(&mut rng, stationary);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        out.push(u);
        u = decay * u + complex_normal(&mut rng, step_var);
    }
    TimeSeries::new(out, dt, T::zero())
}
