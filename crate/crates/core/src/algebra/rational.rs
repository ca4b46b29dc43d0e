//! Arbitrary-precision rationals and conversions to and from `f64`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact scalar: a reduced fraction with positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Rational) -> f64 {
    // Scale down big operands before dividing so that huge numerators and
    // denominators do not overflow to inf/inf.
    let n = x.numer();
    let d = x.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    if nb < 1000 && db < 1000 {
        if let (Some(a), Some(b)) = (n.to_f64(), d.to_f64()) {
            if a.is_finite() && b.is_finite() {
                return a / b;
            }
        }
    }
    let shift = (nb.max(db) - 900).max(0) as usize;
    let a = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let b = (d >> shift).to_f64().unwrap_or(f64::NAN);
    if b == 0.0 {
        // denominator vanished after the shift: the value is huge
        return if n.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    a / b
}

/// Exact value of a finite `f64`.
pub fn from_f64_exact(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions with a final semiconvergent).
pub fn rationalize(x: f64, max_den: u64) -> Result<Rational> {
    let exact = from_f64_exact(x)?;
    let max_den = BigInt::from(max_den.max(1));
    if exact.denom() <= &max_den {
        return Ok(exact);
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut rem = exact.clone();
    loop {
        let a = rem.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            // largest admissible semiconvergent
            let k = (&max_den - &q0) / &q1;
            let cand1 = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
            let cand2 = Rational::new(p1.clone(), q1.clone());
            let e1 = (&cand1 - &exact).abs();
            let e2 = (&cand2 - &exact).abs();
            return Ok(if e1 < e2 { cand1 } else { cand2 });
        }
        let p2 = &p0 + &a * &p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = &rem - Rational::from_integer(a);
        if frac.is_zero() {
            return Ok(Rational::new(p1, q1));
        }
        rem = frac.recip();
    }
}

/// Dyadic rational approximation of `x` accurate to about `2^-bits`.
pub fn approximate(x: f64, bits: u32) -> Rational {
    let scale = BigInt::one() << bits as usize;
    let v = Rational::from_float(x).unwrap_or_else(Rational::zero);
    let scaled = (v * Rational::from_integer(scale.clone())).round().to_integer();
    Rational::new(scaled, scale)
}

/// Canonical text: `n` for integers, `n/d` otherwise.
pub fn format(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Greatest common divisor of the numerators.
pub fn numerator_gcd<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |acc, x| acc.gcd(x.numer()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalize_short_decimals_exactly() {
        assert_eq!(rationalize(-8.312, 1_000_000).unwrap(), ratio(-1039, 125));
        assert_eq!(rationalize(0.5, 10).unwrap(), ratio(1, 2));
    }

    #[test]
    fn rationalize_respects_denominator_bound() {
        let r = rationalize(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(r, ratio(355, 113));
        let r = rationalize(std::f64::consts::E, 1_000_000).unwrap();
        assert!(r.denom() <= &BigInt::from(1_000_000));
        assert!((to_f64(&r) - std::f64::consts::E).abs() < 1e-11);
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "-7", "3/4", "-1039/125"] {
            assert_eq!(format(&parse(s).unwrap()), s);
        }
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn to_f64_handles_huge_operands() {
        let big = Rational::new(BigInt::from(3) << 5000usize, BigInt::from(7) << 5000usize);
        assert!((to_f64(&big) - 3.0 / 7.0).abs() < 1e-15);
    }
}
