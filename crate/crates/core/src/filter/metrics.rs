use crate::armodel::TimeSeries;
use crate::error::{Error, Result};
use crate::num::{Real, C};

/// `sqrt(mean |û_k − u_k|²)`.
pub fn rmse<T: Real>(estimates: &TimeSeries<T>, truth: &TimeSeries<T>) -> Result<T> {
    rmse_values(estimates.values(), truth.values())
}

pub fn rmse_values<T: Real>(estimates: &[C<T>], truth: &[C<T>]) -> Result<T> {
    if estimates.len() != truth.len() {
        return Err(Error::LengthMismatch(estimates.len(), truth.len()));
    }
    if estimates.is_empty() {
        return Err(Error::InvalidArgument("empty series".into()));
    }
    let s: T = estimates.iter().zip(truth).map(|(a, b)| (*a - *b).norm_sqr()).sum();
    Ok((s / T::lit(estimates.len() as f64)).sqrt())
}

/// Bivariate pattern correlation of paired forecasts and verifications,
/// each complex sample read as the vector `(re, im)`:
/// `Σ û·u / (‖û‖₂ ‖u‖₂)`.
pub fn pattern_correlation<T: Real>(forecast: &[C<T>], verification: &[C<T>]) -> Result<T> {
    if forecast.len() != verification.len() {
        return Err(Error::LengthMismatch(forecast.len(), verification.len()));
    }
    let dot: T = forecast.iter().zip(verification).map(|(a, b)| a.re * b.re + a.im * b.im).sum();
    let na: T = forecast.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    let nb: T = verification.iter().map(|b| b.norm_sqr()).sum::<T>().sqrt();
    if na == T::zero() || nb == T::zero() || !(na * nb).is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok((dot / (na * nb)).max(-T::one()).min(T::one()))
}

/// Persistence-style helper: pair `forecasts[l][i]` (issued at verification
/// index `i` for lead `l`) with `verification[i + l]` and return
/// `(lead, PC)` for each lead with at least one pair.
pub fn pattern_correlation_curve<T: Real>(
    forecasts: &[Vec<Option<C<T>>>],
    verification: &[C<T>],
) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (lead, fc) in forecasts.iter().enumerate() {
        let (a, b): (Vec<C<T>>, Vec<C<T>>) = fc
            .iter()
            .enumerate()
            .filter_map(|(i, f)| Some(((*f)?, *verification.get(i + lead)?)))
            .unzip();
        if !a.is_empty() {
            out.push((lead, pattern_correlation(&a, &b)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: Vec<C<f64>>) -> TimeSeries<f64> {
        TimeSeries::new(v, 1.0, 0.0).unwrap()
    }

    #[test]
    fn rmse_basics() {
        let a = ts(vec![C::new(1.0, 2.0), C::new(-1.0, 0.5)]);
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        let c = C::new(0.3, -0.4);
        let b = a.map(|z| z + c);
        assert!((rmse(&b, &a).unwrap() - 0.5).abs() < 1e-15);
        assert!(rmse(&a, &ts(vec![C::new(0.0, 0.0)])).is_err());
    }

    #[test]
    fn pattern_correlation_extremes() {
        let v = vec![C::new(1.0, 2.0), C::new(-0.5, 0.1), C::new(0.0, -1.0)];
        let neg: Vec<_> = v.iter().map(|z| -z).collect();
        assert!((pattern_correlation::<f64>(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        assert!((pattern_correlation::<f64>(&neg, &v).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(pattern_correlation(&[C::new(0.0, 0.0)], &[C::new(1.0, 0.0)]), Err(Error::ZeroNorm)));
    }
}
