use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::model::ArModel;
use super::series::TimeSeries;
use crate::error::Result;
use crate::num::{Real, C};

/// Circular complex Gaussian with total variance `var`.
pub fn complex_normal<T: Real, R: rand::Rng + ?Sized>(rng: &mut R, var: T) -> C<T> {
    let sd = (var.as_f64() / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C::new(T::lit(re * sd), T::lit(im * sd))
}

/// Run the recursion from a zero anomaly state, discard `10 p` burn-in
/// steps and return `steps` samples starting at time zero.
pub fn simulate<T: Real>(model: &ArModel<T>, steps: usize, seed: u64) -> Result<TimeSeries<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = model.order();
    let a = model.coeffs();
    let zero = C::new(T::zero(), T::zero());
    // lags oldest first
    let mut x = vec![zero; p];
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps + 10 * p {
        let mut next = x[p - 1] + model.forcing();
        for j in 0..p {
            next = next + a[j] * x[j];
        }
        if model.noise_variance() > T::zero() {
            next = next + complex_normal(&mut rng, model.noise_variance());
        }
        x.rotate_left(1);
        x[p - 1] = next;
        if k >= 10 * p {
            out.push(model.mean_offset() + next);
        }
    }
    TimeSeries::new(out, model.dt(), T::zero())
}
