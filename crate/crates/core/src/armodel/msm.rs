use crate::error::{Error, Result};
use crate::num::{Real, C};

/// Mean stochastic model parameters from energy and correlation time.
///
/// `correlation_time` is the integral of the normalized autocorrelation,
/// which for `du = λu dt + σ dW` equals `−1/λ`. Hence `λ = −1/𝒯` and
/// `σ² = 2|Re λ| ℰ`.
pub fn msm_parameters<T: Real>(energy: T, correlation_time: C<T>) -> Result<(C<T>, T)> {
    if !(energy > T::zero()) || !energy.is_finite() {
        return Err(Error::InvalidArgument(format!("energy must be positive, got {energy}")));
    }
    if correlation_time.norm() == T::zero() || !correlation_time.norm().is_finite() {
        return Err(Error::InvalidArgument("correlation time must be finite and nonzero".into()));
    }
    let lambda = -C::new(T::one(), T::zero()) / correlation_time;
    if !(lambda.re < T::zero()) {
        return Err(Error::UnstableContinuousDynamics(lambda.re.as_f64()));
    }
    let sigma = (T::lit(2.0) * lambda.re.abs() * energy).sqrt();
    Ok((lambda, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_decay() {
        let (l, s) = msm_parameters(1.0, C::new(1.0, 0.0)).unwrap();
        assert!((l - C::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn oscillating_decay_round_trip() {
        let lam = C::new(-8.312, -8.569);
        let tau = -C::new(1.0, 0.0) / lam;
        let (l, _) = msm_parameters(2.0, tau).unwrap();
        assert!((l - lam).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(msm_parameters(0.0, C::new(1.0, 0.0)).is_err());
        assert!(matches!(msm_parameters(1.0, C::new(-1.0, 0.0)), Err(Error::UnstableContinuousDynamics(_))));
    }
}
