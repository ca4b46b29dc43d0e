use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::multi::MultiSeries;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Lorenz96Config {
    /// Number of sites `J`.
    pub dimension: usize,
    pub forcing: f64,
    /// Output sampling interval.
    pub sample_dt: f64,
    /// Runge-Kutta step; `sample_dt / 4` when absent.
    pub step: Option<f64>,
    pub spin_up: f64,
    pub duration: f64,
    pub seed: u64,
    /// Overrides the random initial state `F + 0.01 N(0, 1)`.
    pub initial: Option<Vec<f64>>,
}

impl Default for Lorenz96Config {
    fn default() -> Self {
        Lorenz96Config {
            dimension: 40,
            forcing: 6.0,
            sample_dt: 1.0 / 64.0,
            step: None,
            spin_up: 100.0,
            duration: 1000.0,
            seed: 0,
            initial: None,
        }
    }
}

impl Lorenz96Config {
    pub fn step(&self) -> f64 {
        self.step.unwrap_or(self.sample_dt / 4.0)
    }

    /// Integrator steps per output sample.
    fn substeps(&self) -> Result<usize> {
        let h = self.step();
        if !(h > 0.0 && h.is_finite()) || !(self.sample_dt > 0.0 && self.sample_dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("steps must be positive: h = {h}, dt = {}", self.sample_dt)));
        }
        let ratio = self.sample_dt / h;
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio {
            return Err(Error::InvalidArgument(format!("sample dt {} is not a multiple of h = {h}", self.sample_dt)));
        }
        Ok(k as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 4 {
            return Err(Error::InvalidArgument(format!("Lorenz-96 needs J >= 4, got {}", self.dimension)));
        }
        if !(self.spin_up >= 0.0) || !(self.duration > 0.0) || !self.forcing.is_finite() {
            return Err(Error::InvalidArgument("spin-up, duration and forcing must be finite, duration > 0".into()));
        }
        if let Some(x0) = &self.initial {
            if x0.len() != self.dimension {
                return Err(Error::LengthMismatch(x0.len(), self.dimension));
            }
        }
        self.substeps().map(|_| ())
    }
}

/// `dx_j/dt = (x_{j+1} − x_{j−2}) x_{j−1} − x_j + F` with cyclic indices.
pub fn lorenz96_rhs(x: &[f64], forcing: f64, out: &mut [f64]) {
    let n = x.len();
    for j in 0..n {
        let p1 = x[(j + 1) % n];
        let m1 = x[(j + n - 1) % n];
        let m2 = x[(j + n - 2) % n];
        out[j] = (p1 - m2) * m1 - x[j] + forcing;
    }
}

/// One classical fourth-order Runge-Kutta step in place.
pub fn rk4_step(x: &mut [f64], forcing: f64, h: f64) {
    let n = x.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    lorenz96_rhs(x, forcing, &mut k1);
    for j in 0..n {
        tmp[j] = x[j] + 0.5 * h * k1[j];
    }
    lorenz96_rhs(&tmp, forcing, &mut k2);
    for j in 0..n {
        tmp[j] = x[j] + 0.5 * h * k2[j];
    }
    lorenz96_rhs(&tmp, forcing, &mut k3);
    for j in 0..n {
        tmp[j] = x[j] + h * k3[j];
    }
    lorenz96_rhs(&tmp, forcing, &mut k4);
    for j in 0..n {
        x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
}

/// Advance `x` by `steps` RK4 steps, failing on a non-finite state.
pub fn advance(x: &mut [f64], forcing: f64, h: f64, steps: usize, t0: f64) -> Result<()> {
    for k in 0..steps {
        rk4_step(x, forcing, h);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationBlowUp(t0 + (k + 1) as f64 * h));
        }
    }
    Ok(())
}

/// Integrate, discard the spin-up and sample every `sample_dt` over
/// `duration`. Time zero of the output is the end of the spin-up.
pub fn integrate_lorenz96(cfg: &Lorenz96Config) -> Result<MultiSeries> {
    cfg.validate()?;
    let h = cfg.step();
    let sub = cfg.substeps()?;
    let mut x = match &cfg.initial {
        Some(x0) => x0.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..cfg.dimension)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    cfg.forcing + 0.01 * z
                })
                .collect()
        }
    };
    let spin_steps = (cfg.spin_up / h).round() as usize;
    advance(&mut x, cfg.forcing, h, spin_steps, -cfg.spin_up)?;
    let samples = (cfg.duration / cfg.sample_dt).round() as usize;
    let mut rows = Vec::with_capacity(samples + 1);
    rows.push(x.clone());
    for k in 0..samples {
        advance(&mut x, cfg.forcing, h, sub, k as f64 * cfg.sample_dt)?;
        rows.push(x.clone());
    }
    MultiSeries::new(rows, cfg.sample_dt, 0.0)
}
