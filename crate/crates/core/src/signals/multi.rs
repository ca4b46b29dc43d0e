use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::armodel::TimeSeries;
use crate::error::{Error, Result};
use crate::num::C;

/// Uniformly sampled real vector signal, one row per time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiSeries {
    rows: Vec<Vec<f64>>,
    dt: f64,
    t0: f64,
}

impl MultiSeries {
    pub fn new(rows: Vec<Vec<f64>>, dt: f64, t0: f64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("series must have at least one sample".into()));
        }
        let j = rows[0].len();
        if j == 0 {
            return Err(Error::InvalidArgument("series must have at least one component".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != j) {
            return Err(Error::LengthMismatch(r.len(), j));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        Ok(MultiSeries { rows, dt, t0 })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.rows[0].len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `(1/J) Σ_j x_j e^{−2πikj/J}` for any integer `k`.
pub fn dft_coefficient(x: &[f64], k: usize) -> C<f64> {
    let n = x.len();
    let mut acc = C::new(0.0, 0.0);
    for (j, v) in x.iter().enumerate() {
        // reduce the phase index first to keep the angle small
        let angle = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
        acc += C::from_polar(*v, angle);
    }
    acc / n as f64
}

/// Complex amplitude of wavenumber `k ∈ [0, J/2]` at every sample.
pub fn fourier_mode(series: &MultiSeries, k: usize) -> Result<TimeSeries<f64>> {
    let j = series.dimension();
    if k > j / 2 {
        return Err(Error::InvalidArgument(format!("wavenumber {k} outside [0, {}]", j / 2)));
    }
    let values = series.rows().iter().map(|x| dft_coefficient(x, k)).collect();
    TimeSeries::new(values, series.dt(), series.t0())
}
