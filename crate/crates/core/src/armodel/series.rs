use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Real, C};

/// Uniformly sampled complex signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct TimeSeries<T> {
    values: Vec<C<T>>,
    dt: T,
    t0: T,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(values: Vec<C<T>>, dt: T, t0: T) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("time series must have at least one sample".into()));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        Ok(TimeSeries { values, dt, t0 })
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C<T>> {
        self.values
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> T {
        self.t0 + self.dt * T::lit(k as f64)
    }

    pub fn mean(&self) -> C<T> {
        let n = T::lit(self.values.len() as f64);
        let s = self.values.iter().fold(C::new(T::zero(), T::zero()), |a, b| a + b);
        s / n
    }

    /// Copy with the temporal mean subtracted.
    pub fn anomalies(&self) -> Self {
        let m = self.mean();
        TimeSeries { values: self.values.iter().map(|v| v - m).collect(), dt: self.dt, t0: self.t0 }
    }

    /// Samples `[start, end)`, keeping the time axis.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.values.len() {
            return Err(Error::InvalidArgument(format!("slice {start}..{end} out of range for {} samples", self.len())));
        }
        Ok(TimeSeries { values: self.values[start..end].to_vec(), dt: self.dt, t0: self.time(start) })
    }

    /// Every `k`-th sample.
    pub fn subsample(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("subsampling factor must be positive".into()));
        }
        Ok(TimeSeries {
            values: self.values.iter().step_by(k).copied().collect(),
            dt: self.dt * T::lit(k as f64),
            t0: self.t0,
        })
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        TimeSeries { values: self.values.iter().map(|v| f(*v)).collect(), dt: self.dt, t0: self.t0 }
    }

    pub fn cast<U: Real>(&self) -> TimeSeries<U> {
        TimeSeries {
            values: self.values.iter().map(|v| crate::num::cast_c(*v)).collect(),
            dt: U::lit(self.dt.as_f64()),
            t0: U::lit(self.t0.as_f64()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_bad_step() {
        assert!(TimeSeries::<f64>::new(vec![], 1.0, 0.0).is_err());
        assert!(TimeSeries::new(vec![C::new(1.0, 0.0)], 0.0, 0.0).is_err());
        assert!(TimeSeries::new(vec![C::new(1.0, 0.0)], f64::NAN, 0.0).is_err());
    }

    #[test]
    fn anomalies_have_zero_mean() {
        let s = TimeSeries::new(vec![C::new(1.0, 2.0), C::new(3.0, -2.0), C::new(5.0, 3.0)], 0.5, 1.0).unwrap();
        assert!(s.anomalies().mean().norm() < 1e-15);
        assert_eq!(s.time(2), 2.0);
    }

    #[test]
    fn subsample_scales_step() {
        let s = TimeSeries::new((0..10).map(|k| C::new(k as f64, 0.0)).collect(), 0.25, 0.0).unwrap();
        let t = s.subsample(3).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.dt(), 0.75);
        assert_eq!(t.values()[1].re, 3.0);
    }
}
