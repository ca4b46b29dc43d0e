//! Closed intervals with exact rational endpoints.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::Poly;
use super::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    /// Interval around a float midpoint with the given radius, both taken
    /// exactly.
    pub fn around(mid: f64, radius: f64) -> Self {
        let m = rational::from_f64_exact(mid).expect("finite midpoint");
        let r = rational::from_f64_exact(radius.abs()).expect("finite radius");
        Interval { lo: &m - &r, hi: &m + &r }
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn radius(&self) -> Rational {
        (&self.hi - &self.lo) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn width_f64(&self) -> f64 {
        rational::to_f64(&self.width())
    }

    pub fn mid_f64(&self) -> f64 {
        rational::to_f64(&self.mid())
    }

    pub fn radius_f64(&self) -> f64 {
        rational::to_f64(&self.radius())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let ps = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = ps.iter().min().expect("four products").clone();
        let hi = ps.iter().max().expect("four products").clone();
        Interval { lo, hi }
    }

    /// Tight power: even powers of an interval straddling zero start at 0.
    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            return Interval::point(Rational::from_integer(1.into()));
        }
        let a = num_traits::pow(self.lo.clone(), n as usize);
        let b = num_traits::pow(self.hi.clone(), n as usize);
        if n % 2 == 1 {
            return Interval { lo: a, hi: b };
        }
        if self.contains_zero() {
            Interval { lo: Rational::zero(), hi: a.max(b) }
        } else if self.lo.is_positive() {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Enclosure of `p` over a box (one interval per variable of `p`).
    pub fn eval_poly(p: &Poly<Rational>, point: &[Interval]) -> Interval {
        assert_eq!(point.len(), p.vars().len(), "box dimension");
        let mut acc = Interval::point(Rational::zero());
        for (e, c) in p.terms() {
            let mut t = Interval::point(c.clone());
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&x.pow(k));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn bisect(&self) -> (Self, Self) {
        let m = self.mid();
        (Interval { lo: self.lo.clone(), hi: m.clone() }, Interval { lo: m, hi: self.hi.clone() })
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rational::format(&self.lo), rational::format(&self.hi))
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: String,
    hi: String,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalRepr { lo: rational::format(&self.lo), hi: rational::format(&self.hi) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        let lo = rational::parse(&r.lo).map_err(serde::de::Error::custom)?;
        let hi = rational::parse(&r.hi).map_err(serde::de::Error::custom)?;
        if lo > hi {
            return Err(serde::de::Error::custom("interval endpoints out of order"));
        }
        Ok(Interval { lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var_names;
    use crate::algebra::rational::{int, ratio};

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(int(a), int(b))
    }

    #[test]
    fn even_power_straddling_zero() {
        assert_eq!(iv(-2, 1).pow(2), iv(0, 4));
        assert_eq!(iv(-3, -1).pow(2), iv(1, 9));
        assert_eq!(iv(-2, 1).pow(3), iv(-8, 1));
    }

    #[test]
    fn products_take_extremes() {
        assert_eq!(iv(-1, 2).mul(&iv(-3, 4)), iv(-6, 8));
    }

    #[test]
    fn polynomial_enclosure_contains_values() {
        let v = var_names(&["x", "y"]);
        let p = Poly::parse("x^2 + -2*x*y + 1/3", &v).unwrap();
        let b = [Interval::new(ratio(1, 2), int(1)), Interval::new(int(-1), ratio(1, 4))];
        let enc = Interval::eval_poly(&p, &b);
        for (x, y) in [(ratio(1, 2), int(-1)), (int(1), ratio(1, 4)), (ratio(3, 4), int(0))] {
            let val = p.eval(&[x, y]);
            assert!(enc.contains(&val));
        }
    }

    #[test]
    fn serde_round_trip() {
        let a = Interval::new(ratio(-1, 3), ratio(7, 2));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Interval>(&s).unwrap(), a);
    }
}
