use serde::{Deserialize, Serialize};

use crate::algebra::complex::{complex_rational, ComplexPoly, ComplexRational};
use crate::algebra::poly::var_names;
use crate::algebra::rational::ratio;
use crate::error::{Error, Result};
use crate::num::{Real, C};

/// AR(3) coefficients satisfying both consistency equalities for every
/// complex `s` and step `δt`:
/// `a₁ = (s − 3/2)λδt`, `a₂ = −(2s − 5/2)λδt`, `a₃ = sλδt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct ConsistentFamily<T> {
    lambda: C<T>,
}

pub fn consistency_family<T: Real>(lambda: C<T>) -> Result<ConsistentFamily<T>> {
    if !(lambda.re < T::zero()) {
        return Err(Error::UnstableContinuousDynamics(lambda.re.as_f64()));
    }
    Ok(ConsistentFamily { lambda })
}

impl<T: Real> ConsistentFamily<T> {
    pub fn lambda(&self) -> C<T> {
        self.lambda
    }

    pub fn coefficients(&self, s: C<T>, dt: T) -> [C<T>; 3] {
        let l = self.lambda * dt;
        let h = |x: f64| C::new(T::lit(x), T::zero());
        [(s - h(1.5)) * l, -(s * T::lit(2.0) - h(2.5)) * l, s * l]
    }

    /// Ascending coefficients of `Π(x) = a₁ + a₂x + (1 + a₃)x² − x³`.
    pub fn characteristic_polynomial(&self, s: C<T>, dt: T) -> [C<T>; 4] {
        let [a1, a2, a3] = self.coefficients(s, dt);
        [a1, a2, a3 + C::new(T::one(), T::zero()), C::new(-T::one(), T::zero())]
    }

    pub fn max_root_modulus(&self, s: C<T>, dt: T) -> T {
        crate::linalg::poly_roots(&self.characteristic_polynomial(s, dt)).iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }
}

/// The family's coefficients as exact polynomials in the complex variable
/// `s` and the real variable `dt`.
pub fn symbolic_coefficients(lambda: &ComplexRational) -> [ComplexPoly; 3] {
    let v = var_names(&["s", "dt"]);
    let one = |re, im| complex_rational(re, im);
    let zero = ratio(0, 1);
    let s = ComplexPoly::var(&v, "s").expect("declared");
    let dt = ComplexPoly::var(&v, "dt").expect("declared");
    let l = dt.scale(lambda);
    let k = |c: ComplexRational| ComplexPoly::constant(v.clone(), c);
    let a1 = &(&s - &k(one(ratio(3, 2), zero.clone()))) * &l;
    let a2 = -(&(&s.scale(&one(ratio(2, 1), zero.clone())) - &k(one(ratio(5, 2), zero.clone()))) * &l);
    let a3 = &s * &l;
    [a1, a2, a3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn s_zero_unit_step() {
        let f = consistency_family(c(-1.0, 0.0)).unwrap();
        let a = f.coefficients(c(0.0, 0.0), 1.0);
        assert_eq!(a, [c(1.5, 0.0), c(-2.5, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn s_three_halves() {
        let f = consistency_family(c(-1.0, 0.0)).unwrap();
        let a = f.coefficients(c(1.5, 0.0), 1.0);
        assert_eq!(a, [c(0.0, 0.0), c(0.5, 0.0), c(-1.5, 0.0)]);
        assert_eq!(a[0] + a[1] + a[2], c(-1.0, 0.0));
    }

    #[test]
    fn unstable_lambda_rejected() {
        assert!(matches!(consistency_family(c(1.0, 0.0)), Err(Error::UnstableContinuousDynamics(_))));
        assert!(consistency_family(c(0.0, 2.0)).is_err());
    }

    #[test]
    fn identities_hold_symbolically() {
        let lam = complex_rational(ratio(-1039, 125), ratio(-8569, 1000));
        let [a1, a2, a3] = symbolic_coefficients(&lam);
        let v = var_names(&["s", "dt"]);
        let ldt = ComplexPoly::var(&v, "dt").unwrap().scale(&lam);
        assert!((&(&(&a1 + &a2) + &a3) - &ldt).is_zero());
        let m4 = complex_rational(int(-4), int(0));
        let m2 = complex_rational(int(-2), int(0));
        assert!((&(&a1.scale(&m4) + &a2.scale(&m2)) - &ldt).is_zero());
    }
}
