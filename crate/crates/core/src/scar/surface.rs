//! The polynomial `r(α, β, δt)` vanishing wherever the family's
//! characteristic polynomial has a root on the unit circle.

use crate::algebra::complex::{
    complex_rational, embed, substitute, ComplexPoly, ComplexPolyPair, ComplexRational, RationalFunction,
};
use crate::algebra::gcd::{content_in, squarefree_part};
use crate::algebra::poly::{var_names, Poly};
use crate::algebra::rational::{self, int, Rational};
use crate::algebra::resultant::resultant;
use crate::algebra::ExactPoly;
use crate::error::{Error, Result};
use crate::num::C;

use super::family::{consistency_family, symbolic_coefficients};

/// Largest denominator used when converting `λ` to an exact rational.
pub const LAMBDA_MAX_DENOMINATOR: u64 = 1_000_000;

pub const SURFACE_VARS: [&str; 3] = ["alpha", "beta", "dt"];

pub fn surface_vars() -> Vec<String> {
    var_names(&SURFACE_VARS)
}

pub fn rationalize_lambda(lambda: C<f64>) -> Result<ComplexRational> {
    Ok(complex_rational(
        rational::rationalize(lambda.re, LAMBDA_MAX_DENOMINATOR)?,
        rational::rationalize(lambda.im, LAMBDA_MAX_DENOMINATOR)?,
    ))
}

/// `Π(s, δt, x) = a₁ + a₂x + (1 + a₃)x² − x³` over variables `[s, dt, x]`.
pub fn characteristic_polynomial_exact(lambda: &ComplexRational) -> ComplexPoly {
    let v = var_names(&["s", "dt", "x"]);
    let [a1, a2, a3] = symbolic_coefficients(lambda);
    let lift = |p: &ComplexPoly| p.with_vars(&v).expect("superset");
    let x = ComplexPoly::var(&v, "x").expect("declared");
    let one = ComplexPoly::constant(v.clone(), complex_rational(int(1), int(0)));
    let x2 = x.pow(2);
    &(&(&lift(&a1) + &(&lift(&a2) * &x)) + &(&(&lift(&a3) + &one) * &x2)) - &x2.mul_monomial(&[0, 0, 1], &complex_rational(int(1), int(0)))
}

fn substitute_s(lambda: &ComplexRational) -> Result<ComplexPoly> {
    let pi = characteristic_polynomial_exact(lambda);
    let ab = var_names(&["alpha", "beta"]);
    let i = complex_rational(int(0), int(1));
    let s_sub = &embed(&Poly::var(&ab, "alpha")?) + &embed(&Poly::var(&ab, "beta")?).scale(&i);
    let out = substitute(&pi, &[("s", RationalFunction::polynomial(s_sub))])?;
    Ok(out.numerator.join())
}

/// Numerator of `Π` at `s = α + βi` and the rational circle point
/// `x = ((1 − q²) + 2qi)/(1 + q²)`, split into real and imaginary parts over
/// `[dt, alpha, beta, q]`. Degree 6 in `q`.
pub fn circle_numerator(lambda: &ComplexRational) -> Result<(ExactPoly, ExactPoly)> {
    let pi = characteristic_polynomial_exact(lambda);
    let ab = var_names(&["alpha", "beta"]);
    let i = complex_rational(int(0), int(1));
    let s_sub = &embed(&Poly::var(&ab, "alpha")?) + &embed(&Poly::var(&ab, "beta")?).scale(&i);
    let q = var_names(&["q"]);
    let qp = |t: &str| Poly::<Rational>::parse(t, &q).expect("literal");
    let x_num = &embed(&qp("1 + -1*q^2")) + &embed(&qp("2*q")).scale(&i);
    let out = substitute(
        &pi,
        &[("s", RationalFunction::polynomial(s_sub)), ("x", RationalFunction { num: x_num, den: qp("1 + q^2") })],
    )?;
    Ok((out.numerator.re, out.numerator.im))
}

/// The same numerator with the common factor `(1 + iq)³` removed: the
/// circle point written as `x = (1 + iq)/(1 − iq)`, so that
/// `g = Σ_k c_k (1 + iq)^k (1 − iq)^{3−k}`. Degree 3 in `q`.
pub fn reduced_circle_numerator(lambda: &ComplexRational) -> Result<(ExactPoly, ExactPoly)> {
    let g = substitute_s(lambda)?;
    let out_vars = var_names(&["dt", "alpha", "beta", "q"]);
    let i = complex_rational(int(0), int(1));
    let one = ComplexPoly::constant(out_vars.clone(), complex_rational(int(1), int(0)));
    let iq = ComplexPoly::var(&out_vars, "q")?.scale(&i);
    let u = &one + &iq;
    let w = &one - &iq;
    let deg = g.degree("x");
    let mut total = ComplexPoly::zero(out_vars.clone());
    for (k, c) in g.coefficients_in("x") {
        let c = c.with_vars(&union_without(&c, "x", &out_vars))?.with_vars(&out_vars)?;
        total = &total + &(&(&c * &u.pow(k)) * &w.pow(deg - k));
    }
    let pair = ComplexPolyPair::split(&total);
    Ok((pair.re, pair.im))
}

fn union_without(p: &ComplexPoly, drop: &str, extra: &[String]) -> Vec<String> {
    let mut v: Vec<String> = p.vars().iter().filter(|n| n.as_str() != drop).cloned().collect();
    for e in extra {
        if !v.contains(e) {
            v.push(e.clone());
        }
    }
    v
}

/// Boundary surface for a floating-point `λ`, rationalized first.
pub fn boundary_surface(lambda: C<f64>) -> Result<ExactPoly> {
    consistency_family(lambda)?;
    boundary_surface_exact(&rationalize_lambda(lambda)?)
}

/// Resultant in `q` of the circle numerator's real and imaginary parts,
/// with powers of `δt`, factors free of `δt`, repeated factors and the
/// rational content removed.
pub fn boundary_surface_exact(lambda: &ComplexRational) -> Result<ExactPoly> {
    if lambda.re >= Rational::from_integer(0.into()) {
        return Err(Error::UnstableContinuousDynamics(rational::to_f64(&lambda.re)));
    }
    let (re, im) = reduced_circle_numerator(lambda)?;
    let res = resultant(&re, &im, "q")?;
    if res.is_zero() {
        return Err(Error::DegeneratePolynomial);
    }
    let res = res.div_monomial(&res.min_exponents());
    let content = content_in(&res, "dt");
    let res = res.div_exact(&content).expect("content divides");
    let r = squarefree_part(&res).primitive_integer();
    if r.degree("dt") == 0 {
        return Err(Error::DegeneratePolynomial);
    }
    r.with_vars(&surface_vars())
}
