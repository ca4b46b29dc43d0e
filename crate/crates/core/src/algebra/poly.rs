//! Sparse multivariate polynomials over a coefficient ring.
//!
//! Terms are keyed by exponent vectors aligned with an ordered list of
//! variable names. The map order is lexicographic with the first variable
//! most significant, so the last entry is the lex-leading term.

use std::collections::BTreeMap;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Coefficient ring.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
        + Send
        + Sync
        + 'static
{
}

/// Coefficient field (exact division available).
pub trait FieldCoeff: Coeff + Div<Output = Self> {}
impl<T> FieldCoeff for T where T: Coeff + Div<Output = T> {}

pub type Monomial = Vec<u32>;

#[derive(Clone)]
pub struct Poly<C> {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, C>,
}

fn check_vars(vars: &[String]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::InvalidArgument(format!("duplicate variable {v}")));
        }
    }
    Ok(())
}

/// Ordered union: the variables of `a` followed by any new ones from `b`.
pub fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    for v in b {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

pub fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl<C: Coeff> Poly<C> {
    pub fn zero(vars: Vec<String>) -> Self {
        check_vars(&vars).expect("duplicate-free variable list");
        Poly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vec<String>, c: C) -> Self {
        let n = vars.len();
        Self::monomial(vars, vec![0; n], c)
    }

    pub fn monomial(vars: Vec<String>, exps: Monomial, c: C) -> Self {
        assert_eq!(vars.len(), exps.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(vars: &[String], name: &str) -> Result<Self> {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Ok(Self::monomial(vars.to_vec(), e, C::one()))
    }

    pub fn from_terms(vars: Vec<String>, terms: impl IntoIterator<Item = (Monomial, C)>) -> Result<Self> {
        check_vars(&vars)?;
        let mut p = Poly { vars, terms: BTreeMap::new() };
        for (e, c) in terms {
            if e.len() != p.vars.len() {
                return Err(Error::InvalidArgument("exponent vector length mismatch".into()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Constant term (zero when absent).
    pub fn constant_term(&self) -> C {
        self.terms.get(&vec![0; self.vars.len()]).cloned().unwrap_or_else(C::zero)
    }

    /// Lex-leading term, first variable most significant.
    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, e: &[u32]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.degree_at(i),
            None => 0,
        }
    }

    pub(crate) fn degree_at(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Names of variables that occur with positive degree.
    pub fn used_vars(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&i| self.degree_at(i) > 0)
            .map(|i| self.vars[i].clone())
            .collect()
    }

    /// Re-express over a different variable list. Fails when a variable
    /// in use is missing from `vars`.
    pub fn with_vars(&self, vars: &[String]) -> Result<Self> {
        check_vars(vars)?;
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            let j = vars.iter().position(|w| w == v);
            if j.is_none() && self.degree_at(i) > 0 {
                return Err(Error::UnknownVariable(v.clone()));
            }
            map.push(j);
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    ne[j] = k;
                }
            }
            (ne, c.clone())
        });
        Self::from_terms(vars.to_vec(), terms)
    }

    pub(crate) fn align(&self, other: &Self) -> (Self, Self) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let vars = union_vars(&self.vars, &other.vars);
        (
            self.with_vars(&vars).expect("superset of variables"),
            other.with_vars(&vars).expect("superset of variables"),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        let terms = self.terms.iter().map(|(e, v)| (e.clone(), v.clone() * c.clone()));
        let mut p = Self::zero(self.vars.clone());
        for (e, v) in terms {
            p.add_term(e, v);
        }
        p
    }

    pub fn mul_monomial(&self, e: &[u32], c: &C) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (m, v) in &self.terms {
            let ne: Monomial = m.iter().zip(e).map(|(a, b)| a + b).collect();
            p.add_term(ne, v.clone() * c.clone());
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.vars.clone(), C::one());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: &str) -> Self {
        let Some(i) = self.var_index(var) else {
            return Self::zero(self.vars.clone());
        };
        let mut p = Self::zero(self.vars.clone());
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            let mut k = C::zero();
            for _ in 0..e[i] {
                k = k + C::one();
            }
            p.add_term(ne, c.clone() * k);
        }
        p
    }

    /// Evaluate in any ring the coefficients embed into.
    pub fn eval_in<T, F>(&self, point: &[T], embed: F) -> T
    where
        T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
        F: Fn(&C) -> T,
    {
        assert_eq!(point.len(), self.vars.len(), "point dimension");
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut t = embed(c);
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn eval(&self, point: &[C]) -> C {
        self.eval_in(point, |c| c.clone())
    }

    /// Substitute a value for one variable. The variable stays in the list
    /// with degree zero.
    pub fn partial_eval(&self, var: &str, value: &C) -> Self {
        let Some(i) = self.var_index(var) else {
            return self.clone();
        };
        let mut p = Self::zero(self.vars.clone());
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..e[i] {
                t = t * value.clone();
            }
            let mut ne = e.clone();
            ne[i] = 0;
            p.add_term(ne, t);
        }
        p
    }

    /// Coefficients as polynomials in the other variables, keyed by the
    /// power of `var`.
    pub fn coefficients_in(&self, var: &str) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        let Some(i) = self.var_index(var) else {
            out.insert(0, self.clone());
            return out;
        };
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[i];
            ne[i] = 0;
            out.entry(k).or_insert_with(|| Self::zero(self.vars.clone())).add_term(ne, c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut p = Poly::zero(self.vars.clone());
        for (e, c) in &self.terms {
            p.add_term(e.clone(), f(c));
        }
        p
    }

    /// Smallest exponent of each variable over all terms.
    pub fn min_exponents(&self) -> Monomial {
        let n = self.vars.len();
        let mut m: Option<Monomial> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(cur) => cur.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; n])
    }

    /// Divide by a monomial that divides every term.
    pub fn div_monomial(&self, e: &[u32]) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let ne: Monomial = m.iter().zip(e).map(|(a, b)| a - b).collect();
            p.add_term(ne, c.clone());
        }
        p
    }
}

impl<C: FieldCoeff> Poly<C> {
    /// Scale so the lex-leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => {
                let inv = C::one() / c.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }
}

impl<C: Coeff> PartialEq for Poly<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        let (a, b) = self.align(other);
        a.terms == b.terms
    }
}

impl<C: Coeff> Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poly").field("vars", &self.vars).field("terms", &self.terms).finish()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a, C: Coeff> $trait<&'a Poly<C>> for &'a Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: &'a Poly<C>) -> Poly<C> {
                let f: fn(&Poly<C>, &Poly<C>) -> Poly<C> = $body;
                if self.vars == rhs.vars {
                    f(self, rhs)
                } else {
                    let (a, b) = self.align(rhs);
                    f(&a, &b)
                }
            }
        }
        impl<C: Coeff> $trait<Poly<C>> for Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let mut p = a.clone();
    for (e, c) in &b.terms {
        p.add_term(e.clone(), c.clone());
    }
    p
});

binop!(Sub, sub, |a, b| {
    let mut p = a.clone();
    for (e, c) in &b.terms {
        p.add_term(e.clone(), -c.clone());
    }
    p
});

binop!(Mul, mul, |a, b| {
    let mut p = Poly::zero(a.vars.clone());
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e: Monomial = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            p.add_term(e, ca.clone() * cb.clone());
        }
    }
    p
});

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}

// ---- canonical text form (rational coefficients) ----

impl Display for Poly<Rational> {
    /// `coeff*var1^e1*var2^e2 + …`, terms in descending lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", rational::format(c))?;
            for (v, &k) in self.vars.iter().zip(e) {
                match k {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    _ => write!(f, "*{v}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl Poly<Rational> {
    /// Exact quotient `self / other`, or `None` when `other` does not divide.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        assert!(!other.is_zero(), "division by zero polynomial");
        let (mut rem, g) = self.align(other);
        let (glt, glc) = {
            let (e, c) = g.leading_term().expect("nonzero");
            (e.clone(), c.clone())
        };
        let mut q = Poly::zero(rem.vars.clone());
        while let Some((e, c)) = rem.leading_term() {
            if e.iter().zip(&glt).any(|(a, b)| a < b) {
                return None;
            }
            let te: Monomial = e.iter().zip(&glt).map(|(a, b)| a - b).collect();
            let tc = c.clone() / glc.clone();
            rem = &rem - &g.mul_monomial(&te, &tc);
            q.add_term(te, tc);
        }
        Some(q)
    }

    /// Parse the canonical text form over the given variable list.
    pub fn parse(text: &str, vars: &[String]) -> Result<Self> {
        let mut p = Poly::zero(vars.to_vec());
        let text = text.trim();
        if text == "0" || text.is_empty() {
            return Ok(p);
        }
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in `{text}`")));
            }
            let mut coeff = Rational::one();
            let mut e = vec![0u32; vars.len()];
            for (k, factor) in term.split('*').enumerate() {
                let factor = factor.trim();
                if k == 0 {
                    if let Ok(c) = rational::parse(factor) {
                        coeff = c;
                        continue;
                    }
                }
                let (neg, factor) = match factor.strip_prefix('-') {
                    Some(rest) if k == 0 => (true, rest),
                    _ => (false, factor),
                };
                if neg {
                    coeff = -coeff;
                }
                let (name, pow) = match factor.split_once('^') {
                    Some((n, d)) => (n, d.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in `{term}`")))?),
                    None => (factor, 1),
                };
                let idx = vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                e[idx] += pow;
            }
            p.add_term(e, coeff);
        }
        Ok(p)
    }

    /// Clear denominators and content: integer coefficients with gcd one and
    /// a positive lex-leading coefficient.
    pub fn primitive_integer(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = rational::denominator_lcm(self.terms.values());
        let scaled = self.scale(&Rational::from_integer(l));
        let g = rational::numerator_gcd(scaled.terms.values());
        let mut s = Rational::from_integer(g).recip();
        if scaled.leading_term().map(|(_, c)| c < &Rational::zero()).unwrap_or(false) {
            s = -s;
        }
        scaled.scale(&s)
    }

    pub fn to_f64(&self) -> Poly<f64> {
        self.map_coeffs(rational::to_f64)
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    variables: Vec<String>,
    terms: String,
}

impl Serialize for Poly<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr { variables: self.vars.clone(), terms: self.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        Poly::parse(&r.terms, &r.variables).map_err(serde::de::Error::custom)
    }
}
