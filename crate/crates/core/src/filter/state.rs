use crate::armodel::ArModel;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::num::{Real, C};

/// Lag-augmented mean (oldest lag first, current value last) and its
/// Hermitian covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterState<T> {
    pub mean: Vec<C<T>>,
    pub cov: CMatrix<T>,
}

impl<T: Real> FilterState<T> {
    pub fn new(mean: Vec<C<T>>, cov: CMatrix<T>) -> Result<Self> {
        if mean.is_empty() || cov.rows() != mean.len() || cov.cols() != mean.len() {
            return Err(Error::InvalidArgument(format!(
                "state of length {} with {}x{} covariance",
                mean.len(),
                cov.rows(),
                cov.cols()
            )));
        }
        Ok(FilterState { mean, cov })
    }

    /// Mean `m` in every lag with covariance `v I`.
    pub fn isotropic(mean: Vec<C<T>>, v: T) -> Self {
        let p = mean.len();
        FilterState { mean, cov: CMatrix::identity(p).scale(C::new(v, T::zero())) }
    }

    pub fn order(&self) -> usize {
        self.mean.len()
    }

    /// Estimate of the current (observed) value.
    pub fn observed_mean(&self) -> C<T> {
        self.mean[self.order() - 1]
    }

    pub fn observed_variance(&self) -> T {
        let p = self.order();
        self.cov[(p - 1, p - 1)].re
    }

    pub fn is_finite(&self) -> bool {
        self.mean.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && self.cov.is_finite()
    }
}

/// The `n`-step forecast map of a model: `Fⁿ`, the accumulated forcing
/// `Σ_{j<n} Fʲ f e_p` and noise `Σ_{j<n} Fʲ Q e_p e_pᵀ (Fʲ)ᴴ`.
#[derive(Clone, Debug)]
pub struct Propagator<T> {
    f_n: CMatrix<T>,
    forcing: Vec<C<T>>,
    noise: CMatrix<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(model: &ArModel<T>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("forecast needs n >= 1 steps".into()));
        }
        let p = model.order();
        let f = model.companion();
        let mut pj = CMatrix::identity(p);
        let mut forcing = vec![C::new(T::zero(), T::zero()); p];
        let mut noise = CMatrix::zeros(p, p);
        let q = model.noise_variance();
        for _ in 0..n {
            let col = pj.column(p - 1);
            for i in 0..p {
                forcing[i] = forcing[i] + col[i] * model.forcing();
                for k in 0..p {
                    noise[(i, k)] = noise[(i, k)] + col[i] * col[k].conj() * q;
                }
            }
            pj = f.mul(&pj);
        }
        Ok(Propagator { f_n: pj, forcing, noise })
    }

    pub fn apply(&self, s: &FilterState<T>) -> FilterState<T> {
        let mean = self.f_n.mul_vec(&s.mean).iter().zip(&self.forcing).map(|(a, b)| *a + *b).collect();
        let cov = self.f_n.mul(&s.cov).mul(&self.f_n.adjoint()).add(&self.noise).hermitian_part();
        FilterState { mean, cov }
    }
}

/// Prior after `n` model steps.
pub fn kalman_forecast<T: Real>(state: &FilterState<T>, model: &ArModel<T>, n: usize) -> Result<FilterState<T>> {
    if state.order() != model.order() {
        return Err(Error::LengthMismatch(state.order(), model.order()));
    }
    Ok(Propagator::new(model, n)?.apply(state))
}

/// Update with a scalar observation of the last component, `G = e_pᵀ`.
/// Returns the posterior and the gain.
pub fn kalman_update<T: Real>(prior: &FilterState<T>, obs: C<T>, r: T) -> Result<(FilterState<T>, Vec<C<T>>)> {
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument(format!("observation variance must be positive, got {r}")));
    }
    let p = prior.order();
    let innovation = obs - prior.observed_mean();
    if !(innovation.re.is_finite() && innovation.im.is_finite()) || !prior.is_finite() {
        return Err(Error::DivergedState);
    }
    let denom = prior.observed_variance() + r;
    let pc = prior.cov.column(p - 1);
    let gain: Vec<C<T>> = pc.iter().map(|c| *c / denom).collect();
    let mean = prior.mean.iter().zip(&gain).map(|(m, k)| *m + *k * innovation).collect();
    let mut cov = prior.cov.clone();
    let last_row = prior.cov.row(p - 1).to_vec();
    for i in 0..p {
        for j in 0..p {
            cov[(i, j)] = cov[(i, j)] - gain[i] * last_row[j];
        }
    }
    let post = FilterState { mean, cov: cov.hermitian_part() };
    if !post.is_finite() {
        return Err(Error::DivergedState);
    }
    Ok((post, gain))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn random_walk_forecast_adds_noise() {
        let m = ArModel::new(vec![c(0.0, 0.0)], 0.3, 1.0).unwrap();
        let s = FilterState::isotropic(vec![c(1.0, 2.0)], 2.0);
        let prior = kalman_forecast(&s, &m, 1).unwrap();
        assert_eq!(prior.mean, vec![c(1.0, 2.0)]);
        assert!((prior.observed_variance() - 2.3).abs() < 1e-15);
    }

    #[test]
    fn scalar_update_halves_unit_variance() {
        let s = FilterState::isotropic(vec![c(0.0, 0.0)], 1.0);
        let (post, k) = kalman_update(&s, c(1.0, 0.0), 1.0).unwrap();
        assert!((k[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((post.observed_variance() - 0.5).abs() < 1e-15);
        assert!((post.observed_mean() - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn huge_observation_noise_leaves_prior() {
        let s = FilterState::isotropic(vec![c(0.3, 0.1); 3], 1.0);
        let (post, k) = kalman_update(&s, c(5.0, 5.0), 1e12).unwrap();
        assert!(k.iter().all(|g| g.norm() < 1e-11));
        assert!((post.observed_mean() - s.observed_mean()).norm() < 1e-10);
    }

    #[test]
    fn non_finite_observation_is_divergence() {
        let s = FilterState::isotropic(vec![c(0.0, 0.0)], 1.0);
        assert!(matches!(kalman_update(&s, c(f64::NAN, 0.0), 1.0), Err(Error::DivergedState)));
    }
}
