use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{poly_roots, CMatrix};
use crate::num::{cast_c, Real, C};

/// Tolerance under which a root modulus counts as strictly inside the unit
/// circle.
pub const STABILITY_MARGIN: f64 = 1e-12;

/// Tolerance for the consistency equalities.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "YW")]
    YuleWalker,
    #[serde(rename = "CYW")]
    ConstrainedYuleWalker,
    #[serde(rename = "SCAR")]
    Scar,
}

/// Complex AR(p) model.
///
/// The recursion runs on anomalies around `mean_offset`:
/// `x_{m+1} = F x_m + f e_p + e_{m+1}` with `u_m = mean_offset + x_m`, where
/// `F` is the companion matrix with last row `(a₁, …, a_{p−1}, 1 + a_p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArModel<T> {
    coeffs: Vec<C<T>>,
    forcing: C<T>,
    noise_variance: T,
    dt: T,
    mean_offset: C<T>,
    provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityCheck<T> {
    pub stable: bool,
    pub max_modulus: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyCheck<T> {
    pub consistent: bool,
    /// `|ℓ Σ (j−p)^{ℓ−1} a_j − λ dt|` for ℓ = 1, …, q.
    pub residuals: Vec<T>,
}

impl<T: Real> ArModel<T> {
    pub fn new(coeffs: Vec<C<T>>, noise_variance: T, dt: T) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("AR order must be at least 1".into()));
        }
        if !(noise_variance >= T::zero()) || !noise_variance.is_finite() {
            return Err(Error::InvalidArgument(format!("noise variance must be nonnegative, got {noise_variance}")));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        if coeffs.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite AR coefficient".into()));
        }
        let zero = C::new(T::zero(), T::zero());
        Ok(ArModel { coeffs, forcing: zero, noise_variance, dt, mean_offset: zero, provenance: Provenance::YuleWalker })
    }

    pub fn with_forcing(mut self, f: C<T>) -> Self {
        self.forcing = f;
        self
    }

    pub fn with_mean_offset(mut self, m: C<T>) -> Self {
        self.mean_offset = m;
        self
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    pub fn with_noise_variance(mut self, q: T) -> Result<Self> {
        if !(q >= T::zero()) {
            return Err(Error::InvalidArgument(format!("noise variance must be nonnegative, got {q}")));
        }
        self.noise_variance = q;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn forcing(&self) -> C<T> {
        self.forcing
    }

    pub fn noise_variance(&self) -> T {
        self.noise_variance
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn mean_offset(&self) -> C<T> {
        self.mean_offset
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn companion(&self) -> CMatrix<T> {
        let p = self.order();
        let mut f = CMatrix::zeros(p, p);
        for i in 0..p - 1 {
            f[(i, i + 1)] = C::new(T::one(), T::zero());
        }
        for (j, a) in self.coeffs.iter().enumerate() {
            f[(p - 1, j)] = *a;
        }
        f[(p - 1, p - 1)] = f[(p - 1, p - 1)] + C::new(T::one(), T::zero());
        f
    }

    /// Coefficients of `Π(x) = Σ a_j x^{j−1} + x^{p−1} − x^p`, ascending.
    pub fn characteristic_polynomial(&self) -> Vec<C<T>> {
        let p = self.order();
        let mut c = self.coeffs.clone();
        c[p - 1] = c[p - 1] + C::new(T::one(), T::zero());
        c.push(C::new(-T::one(), T::zero()));
        c
    }

    pub fn characteristic_roots(&self) -> Vec<C<T>> {
        poly_roots(&self.characteristic_polynomial())
    }

    pub fn is_stable(&self) -> StabilityCheck<T> {
        let max_modulus = self.characteristic_roots().iter().map(|z| z.norm()).fold(T::zero(), T::max);
        StabilityCheck { stable: max_modulus < T::one() - T::lit(STABILITY_MARGIN), max_modulus }
    }

    pub fn is_consistent(&self, lambda: C<T>, q: usize) -> Result<ConsistencyCheck<T>> {
        if !(1..=2).contains(&q) {
            return Err(Error::InvalidArgument(format!("consistency order must be 1 or 2, got {q}")));
        }
        let residuals = consistency_residuals(&self.coeffs, lambda * self.dt)[..q].to_vec();
        let consistent = residuals.iter().all(|r| *r <= T::lit(CONSISTENCY_TOL));
        Ok(ConsistencyCheck { consistent, residuals })
    }

    pub fn cast<U: Real>(&self) -> ArModel<U> {
        ArModel {
            coeffs: self.coeffs.iter().map(|a| cast_c(*a)).collect(),
            forcing: cast_c(self.forcing),
            noise_variance: U::lit(self.noise_variance.as_f64()),
            dt: U::lit(self.dt.as_f64()),
            mean_offset: cast_c(self.mean_offset),
            provenance: self.provenance,
        }
    }
}

/// `|ℓ Σ_j (j−p)^{ℓ−1} a_j − λδt|` for ℓ = 1, 2.
pub fn consistency_residuals<T: Real>(coeffs: &[C<T>], lambda_dt: C<T>) -> [T; 2] {
    let p = coeffs.len() as i64;
    let zero = C::new(T::zero(), T::zero());
    let s1 = coeffs.iter().fold(zero, |s, a| s + a);
    let s2 = coeffs.iter().enumerate().fold(zero, |s, (j, a)| s + a * T::lit((j as i64 + 1 - p) as f64));
    [(s1 - lambda_dt).norm(), (s2 * T::lit(2.0) - lambda_dt).norm()]
}

/// On-disk model representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub p: usize,
    pub coeffs: Vec<[f64; 2]>,
    pub f: [f64; 2],
    #[serde(rename = "Q")]
    pub q: f64,
    pub dt: f64,
    pub mean_offset: [f64; 2],
    pub provenance: Provenance,
}

impl<T: Real> From<&ArModel<T>> for ModelFile {
    fn from(m: &ArModel<T>) -> Self {
        let pair = |z: &C<T>| [z.re.as_f64(), z.im.as_f64()];
        ModelFile {
            p: m.order(),
            coeffs: m.coeffs.iter().map(pair).collect(),
            f: pair(&m.forcing),
            q: m.noise_variance.as_f64(),
            dt: m.dt.as_f64(),
            mean_offset: pair(&m.mean_offset),
            provenance: m.provenance,
        }
    }
}

impl ModelFile {
    pub fn into_model<T: Real>(self) -> Result<ArModel<T>> {
        if self.coeffs.len() != self.p {
            return Err(Error::LengthMismatch(self.p, self.coeffs.len()));
        }
        let z = |v: [f64; 2]| C::new(T::lit(v[0]), T::lit(v[1]));
        Ok(ArModel::new(self.coeffs.into_iter().map(z).collect(), T::lit(self.q), T::lit(self.dt))?
            .with_forcing(z(self.f))
            .with_mean_offset(z(self.mean_offset))
            .with_provenance(self.provenance))
    }
}

impl<T: Real> ArModel<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelFile>(text)?.into_model()
    }
}
