//! Polynomials with Gaussian-rational coefficients and their split into
//! real and imaginary parts, plus substitution of rational functions.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{union_vars, Poly};
use super::rational::Rational;
use crate::error::{Error, Result};

pub type ComplexRational = Complex<Rational>;
pub type ComplexPoly = Poly<ComplexRational>;

/// Real and imaginary parts of a complex polynomial in real variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPolyPair {
    pub re: Poly<Rational>,
    pub im: Poly<Rational>,
}

impl ComplexPolyPair {
    pub fn split(p: &ComplexPoly) -> Self {
        ComplexPolyPair { re: p.map_coeffs(|c| c.re.clone()), im: p.map_coeffs(|c| c.im.clone()) }
    }

    pub fn join(&self) -> ComplexPoly {
        let (re, im) = self.re.align(&self.im);
        let a = re.map_coeffs(|c| Complex::new(c.clone(), Rational::zero()));
        let b = im.map_coeffs(|c| Complex::new(Rational::zero(), c.clone()));
        &a + &b
    }

    pub fn vars(&self) -> Vec<String> {
        union_vars(self.re.vars(), self.im.vars())
    }
}

pub fn complex_rational(re: Rational, im: Rational) -> ComplexRational {
    Complex::new(re, im)
}

pub fn embed(p: &Poly<Rational>) -> ComplexPoly {
    p.map_coeffs(|c| Complex::new(c.clone(), Rational::zero()))
}

/// `num / den` with a real denominator; numerators may carry the
/// imaginary unit.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    pub num: ComplexPoly,
    pub den: Poly<Rational>,
}

impl RationalFunction {
    pub fn polynomial(num: ComplexPoly) -> Self {
        let den = Poly::constant(num.vars().to_vec(), Rational::one());
        RationalFunction { num, den }
    }
}

/// Result of substituting rational functions: numerator split into real and
/// imaginary parts over the cleared common denominator.
#[derive(Clone, Debug)]
pub struct Substitution {
    pub numerator: ComplexPolyPair,
    pub denominator: Poly<Rational>,
}

/// Substitute rational functions for variables of `p` and clear the common
/// denominator. Each bound variable `v` of degree `d` contributes `den^d`.
pub fn substitute(p: &ComplexPoly, bindings: &[(&str, RationalFunction)]) -> Result<Substitution> {
    let mut indices = Vec::new();
    for (name, f) in bindings {
        let idx = p.var_index(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        if f.den.is_zero() {
            return Err(Error::ZeroDenominator(name.to_string()));
        }
        indices.push(idx);
    }
    // output variables: free variables of p, then binding variables
    let bound: Vec<&str> = bindings.iter().map(|(n, _)| *n).collect();
    let mut out_vars: Vec<String> = p.vars().iter().filter(|v| !bound.contains(&v.as_str())).cloned().collect();
    for (_, f) in bindings {
        out_vars = union_vars(&out_vars, f.num.vars());
        out_vars = union_vars(&out_vars, f.den.vars());
    }
    let lift = |q: &ComplexPoly| q.with_vars(&out_vars).expect("output variables cover bindings");
    let nums: Vec<ComplexPoly> = bindings.iter().map(|(_, f)| lift(&f.num)).collect();
    let dens: Vec<ComplexPoly> = bindings.iter().map(|(_, f)| lift(&embed(&f.den))).collect();
    let degs: Vec<u32> = indices.iter().map(|&i| p.degree(&p.vars()[i])).collect();

    // cached powers
    let mut num_pows: Vec<BTreeMap<u32, ComplexPoly>> = vec![BTreeMap::new(); bindings.len()];
    let mut den_pows: Vec<BTreeMap<u32, ComplexPoly>> = vec![BTreeMap::new(); bindings.len()];
    let mut total = ComplexPoly::zero(out_vars.clone());
    for (e, c) in p.terms() {
        let mut free = vec![0u32; out_vars.len()];
        for (i, v) in p.vars().iter().enumerate() {
            if let Some(j) = out_vars.iter().position(|w| w == v) {
                if !indices.contains(&i) {
                    free[j] = e[i];
                }
            }
        }
        let mut term = ComplexPoly::monomial(out_vars.clone(), free, c.clone());
        for (b, &i) in indices.iter().enumerate() {
            let k = e[i];
            let np = num_pows[b].entry(k).or_insert_with(|| nums[b].pow(k)).clone();
            let dp = den_pows[b].entry(degs[b] - k).or_insert_with(|| dens[b].pow(degs[b] - k)).clone();
            term = &(&term * &np) * &dp;
        }
        total = &total + &term;
    }
    let mut denominator = Poly::constant(out_vars.clone(), Rational::one());
    for (b, (_, f)) in bindings.iter().enumerate() {
        denominator = &denominator * &f.den.with_vars(&out_vars)?.pow(degs[b]);
    }
    Ok(Substitution { numerator: ComplexPolyPair::split(&total), denominator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var_names;
    use crate::algebra::rational::int;

    fn cr(re: i64, im: i64) -> ComplexRational {
        complex_rational(int(re), int(im))
    }

    #[test]
    fn square_of_unit_circle_point() {
        let x_only = var_names(&["x"]);
        let x2 = ComplexPoly::monomial(x_only, vec![2], cr(1, 0));
        let q = var_names(&["q"]);
        let p = |t: &str| Poly::<Rational>::parse(t, &q).unwrap();
        let num = &embed(&p("1 + -1*q^2")) + &embed(&p("2*q")).scale(&cr(0, 1));
        let binding = RationalFunction { num, den: p("1 + q^2") };
        let s = substitute(&x2, &[("x", binding)]).unwrap();
        // (1-q^2)^2 - 4q^2 and 4q(1-q^2)
        assert_eq!(s.numerator.re, p("q^4 + -6*q^2 + 1"));
        assert_eq!(s.numerator.im, p("-4*q^3 + 4*q"));
        assert_eq!(s.denominator, p("q^4 + 2*q^2 + 1"));
    }

    #[test]
    fn identity_binding_of_complex_variable() {
        let s_var = var_names(&["s"]);
        let sp = ComplexPoly::var(&s_var, "s").unwrap();
        let ab = var_names(&["alpha", "beta"]);
        let a = embed(&Poly::var(&ab, "alpha").unwrap());
        let b = embed(&Poly::var(&ab, "beta").unwrap()).scale(&cr(0, 1));
        let out = substitute(&sp, &[("s", RationalFunction::polynomial(&a + &b))]).unwrap();
        assert_eq!(out.numerator.re, Poly::var(&ab, "alpha").unwrap());
        assert_eq!(out.numerator.im, Poly::var(&ab, "beta").unwrap());
        assert!(out.denominator.is_constant());
        assert_eq!(out.denominator.constant_term(), int(1));
    }

    #[test]
    fn unknown_binding_target_is_an_error() {
        let x2 = ComplexPoly::monomial(var_names(&["x"]), vec![2], cr(1, 0));
        let f = RationalFunction::polynomial(ComplexPoly::constant(var_names(&["q"]), cr(1, 0)));
        assert!(matches!(substitute(&x2, &[("z", f)]), Err(Error::UnknownVariable(_))));
    }
}
