use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::armodel::{complex_normal, ArModel};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::num::{Real, C};

/// Spread below which an ensemble counts as collapsed.
pub const MIN_SPREAD: f64 = 1e-12;
/// Lower bound for estimated observation variances.
pub const NOISE_FLOOR: f64 = 1e-8;
/// Smallest innovation sample accepted by the batch estimator.
pub const MIN_INNOVATIONS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<T> {
    members: Vec<Vec<C<T>>>,
}

impl<T: Real> Ensemble<T> {
    pub fn new(members: Vec<Vec<C<T>>>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidArgument(format!("ensemble needs at least 2 members, got {}", members.len())));
        }
        let p = members[0].len();
        if p == 0 || members.iter().any(|m| m.len() != p) {
            return Err(Error::InvalidArgument("ensemble members must share a nonzero length".into()));
        }
        Ok(Ensemble { members })
    }

    /// Members drawn around `mean` with independent complex Gaussian
    /// perturbations of variance `var` in every component.
    pub fn sample<R: Rng + ?Sized>(mean: &[C<T>], var: T, size: usize, rng: &mut R) -> Result<Self> {
        let members =
            (0..size).map(|_| mean.iter().map(|m| *m + complex_normal(rng, var)).collect()).collect();
        Self::new(members)
    }

    pub fn members(&self) -> &[Vec<C<T>>] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn order(&self) -> usize {
        self.members[0].len()
    }

    pub fn mean(&self) -> Vec<C<T>> {
        let k = T::lit(self.size() as f64);
        (0..self.order()).map(|i| self.members.iter().map(|m| m[i]).sum::<C<T>>() / k).collect()
    }

    /// Unbiased sample covariance.
    pub fn covariance(&self) -> CMatrix<T> {
        let p = self.order();
        let mean = self.mean();
        let mut c = CMatrix::zeros(p, p);
        for m in &self.members {
            for i in 0..p {
                for j in 0..p {
                    c[(i, j)] = c[(i, j)] + (m[i] - mean[i]) * (m[j] - mean[j]).conj();
                }
            }
        }
        c.scale(C::new(T::one() / T::lit((self.size() - 1) as f64), T::zero()))
    }

    /// Total variance (trace of the covariance).
    pub fn spread(&self) -> T {
        let c = self.covariance();
        (0..self.order()).map(|i| c[(i, i)].re).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnkfStep<T> {
    /// `v − G x̄⁻`.
    pub innovation: C<T>,
    /// Forecast-ensemble variance of the observed component.
    pub prior_variance: T,
}

/// One cycle of the ensemble transform Kalman filter with a scalar
/// observation of the last component: `n` stochastic model steps per
/// member, then a symmetric square-root analysis. `inflation` multiplies the
/// forecast perturbations.
pub fn enkf_step<T: Real, R: Rng + ?Sized>(
    ensemble: &Ensemble<T>,
    model: &ArModel<T>,
    obs: C<T>,
    r_estimate: T,
    n: usize,
    inflation: T,
    rng: &mut R,
) -> Result<(Ensemble<T>, EnkfStep<T>)> {
    if ensemble.order() != model.order() {
        return Err(Error::LengthMismatch(ensemble.order(), model.order()));
    }
    if !(r_estimate > T::zero()) {
        return Err(Error::InvalidArgument(format!("observation variance must be positive, got {r_estimate}")));
    }
    let p = model.order();
    let f = model.companion();
    let q = model.noise_variance();
    let mut forecast: Vec<Vec<C<T>>> = ensemble.members.clone();
    for m in &mut forecast {
        for _ in 0..n {
            *m = f.mul_vec(m);
            m[p - 1] = m[p - 1] + model.forcing();
            if q > T::zero() {
                m[p - 1] = m[p - 1] + complex_normal(rng, q);
            }
        }
    }
    let fc = Ensemble { members: forecast };
    if !(fc.spread().as_f64() >= MIN_SPREAD) {
        return Err(if fc.members.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Error::EnsembleDegenerate
        } else {
            Error::DivergedState
        });
    }
    let k = fc.size();
    let km1 = T::lit((k - 1) as f64);
    let mean = fc.mean();
    let pert: Vec<Vec<C<T>>> =
        fc.members.iter().map(|m| m.iter().zip(&mean).map(|(a, b)| (*a - *b) * inflation).collect()).collect();
    let y: Vec<C<T>> = pert.iter().map(|a| a[p - 1]).collect();
    let yy: T = y.iter().map(|v| v.norm_sqr()).sum();
    let innovation = obs - mean[p - 1];
    if !(innovation.re.is_finite() && innovation.im.is_finite()) {
        return Err(Error::DivergedState);
    }
    // (K−1) P̃ = I − c v vᴴ with v = ȳ/|y|, c = |y|²/(R(K−1) + |y|²)
    let denom = r_estimate * km1 + yy;
    // mean weights P̃ yᴴ R⁻¹ d, simplified through Sherman–Morrison
    let w_mean: Vec<C<T>> = y.iter().map(|yk| yk.conj() * innovation / denom).collect();
    // symmetric square root I − (1 − √(1 − c)) v vᴴ
    let c = yy / denom;
    let shrink = if yy > T::zero() { (T::one() - (T::one() - c).sqrt()) / yy } else { T::zero() };
    let mut members = Vec::with_capacity(k);
    let shift: Vec<C<T>> =
        (0..p).map(|i| pert.iter().zip(&w_mean).map(|(a, w)| a[i] * *w).sum::<C<T>>()).collect();
    // rank-one correction of member j: (Σ_l a_l ȳ_l) y_j
    let proj: Vec<C<T>> =
        (0..p).map(|i| pert.iter().zip(&y).map(|(a, yl)| a[i] * yl.conj()).sum::<C<T>>()).collect();
    for (j, a) in pert.iter().enumerate() {
        let yj = y[j];
        members.push(
            (0..p)
                .map(|i| mean[i] + shift[i] + a[i] - proj[i] * yj * shrink)
                .collect::<Vec<C<T>>>(),
        );
    }
    let prior_variance = yy / km1;
    Ok((Ensemble { members }, EnkfStep { innovation, prior_variance }))
}

/// `max(mean |ε|² − mean prior variance, floor)` over a batch.
pub fn adaptive_noise_estimate<T: Real>(innovations: &[C<T>], prior_vars: &[T]) -> Result<T> {
    if innovations.len() != prior_vars.len() {
        return Err(Error::LengthMismatch(innovations.len(), prior_vars.len()));
    }
    if innovations.len() < MIN_INNOVATIONS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_INNOVATIONS} innovations, got {}",
            innovations.len()
        )));
    }
    let n = T::lit(innovations.len() as f64);
    let e = innovations.iter().map(|z| z.norm_sqr()).sum::<T>() / n;
    let v = prior_vars.iter().copied().sum::<T>() / n;
    Ok((e - v).max(T::lit(NOISE_FLOOR)))
}

/// Exponentially weighted version of [`adaptive_noise_estimate`], with
/// bias correction for the first samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveNoise {
    pub forgetting: f64,
    innovation_power: f64,
    prior_variance: f64,
    weight: f64,
}

impl Default for AdaptiveNoise {
    fn default() -> Self {
        Self::new(0.99)
    }
}

impl AdaptiveNoise {
    pub fn new(forgetting: f64) -> Self {
        AdaptiveNoise { forgetting, innovation_power: 0.0, prior_variance: 0.0, weight: 0.0 }
    }

    pub fn push(&mut self, innovation: C<f64>, prior_variance: f64) {
        let w = self.forgetting;
        self.innovation_power = w * self.innovation_power + (1.0 - w) * innovation.norm_sqr();
        self.prior_variance = w * self.prior_variance + (1.0 - w) * prior_variance;
        self.weight = w * self.weight + (1.0 - w);
    }

    pub fn samples_weight(&self) -> f64 {
        self.weight
    }

    pub fn estimate(&self) -> Option<f64> {
        if self.weight == 0.0 {
            return None;
        }
        Some(((self.innovation_power - self.prior_variance) / self.weight).max(NOISE_FLOOR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_innovations_hit_floor() {
        let z = vec![C::new(0.0, 0.0); 40];
        assert_eq!(adaptive_noise_estimate(&z, &[0.0; 40]).unwrap(), NOISE_FLOOR);
    }

    #[test]
    fn short_batches_rejected() {
        assert!(adaptive_noise_estimate(&[C::new(1.0, 0.0); 10], &[0.0; 10]).is_err());
    }

    #[test]
    fn analysis_preserves_size_and_is_deterministic() {
        let m = ArModel::new(vec![C::new(-0.2, 0.1), C::new(0.05, 0.0)], 0.1, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = Ensemble::sample(&[C::new(0.0, 0.0); 2], 1.0, 20, &mut rng).unwrap();
        let run = |seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            enkf_step(&e, &m, C::new(0.5, -0.5), 0.2, 2, 1.0, &mut r).unwrap()
        };
        assert_eq!(run(9), run(9));
        assert_eq!(run(9).0.size(), 20);
    }

    #[test]
    fn collapsed_ensemble_rejected() {
        let m = ArModel::new(vec![C::new(-0.2, 0.0)], 0.0, 1.0).unwrap();
        let e = Ensemble::new(vec![vec![C::new(1.0, 0.0)]; 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(enkf_step(&e, &m, C::new(0.0, 0.0), 1.0, 1, 1.0, &mut rng), Err(Error::EnsembleDegenerate)));
    }
}
