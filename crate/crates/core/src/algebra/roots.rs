//! Certified real root isolation: Sturm sequences for univariate
//! polynomials, and elimination plus interval filtering for
//! zero-dimensional systems.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::gcd::common_vars;
use super::groebner::{groebner_basis, Budget};
use super::interval::Interval;
use super::poly::Poly;
use super::rational::{self, Rational};
use crate::error::{Error, Result};

type P = Poly<Rational>;

/// Dense univariate polynomial, coefficient `k` multiplies `x^k`.
#[derive(Clone, Debug, PartialEq)]
struct Dense(Vec<Rational>);

impl Dense {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lc(&self) -> &Rational {
        self.0.last().expect("nonzero")
    }

    fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn derivative(&self) -> Self {
        Dense(self.0.iter().enumerate().skip(1).map(|(k, c)| c * Rational::from_integer((k as i64).into())).collect())
            .trim()
    }

    fn rem(&self, b: &Self) -> Self {
        let mut r = self.0.clone();
        let db = b.degree();
        let inv = b.lc().recip();
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1;
            let q = &r[k] * &inv;
            if !q.is_zero() {
                for (j, bc) in b.0.iter().enumerate() {
                    r[k - db + j] -= &q * bc;
                }
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Dense(r).trim()
    }

    fn div(&self, b: &Self) -> Self {
        let mut r = self.0.clone();
        let db = b.degree();
        let inv = b.lc().recip();
        let mut q = vec![Rational::zero(); self.0.len().saturating_sub(db)];
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1;
            let c = &r[k] * &inv;
            for (j, bc) in b.0.iter().enumerate() {
                r[k - db + j] -= &c * bc;
            }
            q[k - db] = c;
            r.pop();
        }
        Dense(q).trim()
    }

    fn monic(&self) -> Self {
        let inv = self.lc().recip();
        Dense(self.0.iter().map(|c| c * &inv).collect())
    }

    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn squarefree(&self) -> Self {
        let d = self.derivative();
        if d.is_zero() {
            return self.clone();
        }
        self.div(&self.gcd(&d))
    }

    /// Every real root has absolute value below this bound.
    fn cauchy_bound(&self) -> Rational {
        let lc = self.lc().abs();
        let m = self.0[..self.degree()].iter().map(|c| c.abs() / &lc).max().unwrap_or_else(Rational::zero);
        m + Rational::one()
    }
}

fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

struct Sturm(Vec<Dense>);

impl Sturm {
    fn new(p: &Dense) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(Dense(r.0.into_iter().map(|c| -c).collect()));
        }
        Sturm(seq)
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for s in self.0.iter().map(|q| sign(&q.eval(x))) {
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }
}

/// Open interval of the real line; `None` ends are unbounded.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpenInterval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl OpenInterval {
    pub fn all() -> Self {
        OpenInterval::default()
    }

    pub fn positive() -> Self {
        OpenInterval { lo: Some(Rational::zero()), hi: None }
    }

    pub fn between(lo: Rational, hi: Rational) -> Self {
        OpenInterval { lo: Some(lo), hi: Some(hi) }
    }
}

/// Default certified width of returned root intervals.
pub const DEFAULT_ROOT_WIDTH: f64 = 1e-10;

fn univariate(p: &P) -> Result<Dense> {
    let used = p.used_vars();
    if used.len() > 1 {
        return Err(Error::UnsupportedSystem(format!("expected one variable, found {}", used.join(", "))));
    }
    let mut coeffs = Vec::new();
    match used.first() {
        None => coeffs.push(p.constant_term()),
        Some(v) => {
            for (k, c) in p.coefficients_in(v) {
                let k = k as usize;
                if coeffs.len() <= k {
                    coeffs.resize(k + 1, Rational::zero());
                }
                coeffs[k] = c.constant_term();
            }
        }
    }
    Ok(Dense(coeffs).trim())
}

/// All distinct real roots of a univariate polynomial inside `domain`,
/// ascending, each enclosed by an interval of width at most `width`.
/// Exact rational roots are returned as point intervals.
pub fn real_roots_univariate(p: &P, domain: &OpenInterval, width: f64) -> Result<Vec<Interval>> {
    let d = univariate(p)?;
    if d.is_zero() {
        return Err(Error::DegeneratePolynomial);
    }
    if d.degree() == 0 {
        return Ok(Vec::new());
    }
    let sq = d.squarefree();
    let sturm = Sturm::new(&sq);
    let bound = sq.cauchy_bound();
    let lo = match &domain.lo {
        Some(a) => a.clone().max(-bound.clone()),
        None => -bound.clone(),
    };
    let hi = match &domain.hi {
        Some(b) => b.clone().min(bound.clone()),
        None => bound.clone(),
    };
    if lo >= hi {
        return Ok(Vec::new());
    }
    let width = rational::approximate(width.max(1e-300), 60);
    let mut out = Vec::new();
    // stack of half-open (a, b] with their variation counts
    let mut stack = vec![(lo.clone(), hi.clone(), sturm.variations(&lo), sturm.variations(&hi))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let n = va - vb;
        if n == 0 {
            continue;
        }
        if n == 1 {
            if let Some(r) = refine(&sq, a, b, &width) {
                out.push(r);
            }
            continue;
        }
        let m = (&a + &b) / Rational::from_integer(2.into());
        let vm = sturm.variations(&m);
        stack.push((a, m.clone(), va, vm));
        stack.push((m, b, vm, vb));
    }
    // the domain is open: drop a root sitting exactly on the upper end
    out.retain(|iv| !(iv.lo == iv.hi && domain.hi.as_ref() == Some(&iv.lo)));
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(out)
}

/// Shrink `(a, b]` holding exactly one simple root of `p`.
fn refine(p: &Dense, mut a: Rational, mut b: Rational, width: &Rational) -> Option<Interval> {
    let mut sb = sign(&p.eval(&b));
    if sb == 0 {
        return Some(Interval::point(b));
    }
    let two = Rational::from_integer(2.into());
    while &(&b - &a) > width {
        let m = (&a + &b) / &two;
        let sm = sign(&p.eval(&m));
        if sm == 0 {
            return Some(Interval::point(m));
        }
        if sm != sb {
            a = m;
        } else {
            b = m;
            sb = sm;
        }
    }
    Some(Interval::new(a, b))
}

/// A real solution: one enclosing interval per variable. `certified` is
/// true when the enclosure comes from exact isolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealPoint {
    pub coordinates: BTreeMap<String, Interval>,
    pub certified: bool,
}

impl RealPoint {
    pub fn get(&self, var: &str) -> Option<&Interval> {
        self.coordinates.get(var)
    }

    pub fn mid_f64(&self, var: &str) -> Option<f64> {
        self.get(var).map(Interval::mid_f64)
    }

    /// Box aligned with the given variable order.
    pub fn boxed(&self, vars: &[String]) -> Option<Vec<Interval>> {
        vars.iter().map(|v| self.coordinates.get(v).cloned()).collect()
    }
}

/// All real solutions of a zero-dimensional system. For each variable the
/// univariate eliminant is isolated; the product boxes are kept when every
/// generator's interval enclosure contains zero.
pub fn real_solve(system: &[P], width: f64, budget: Budget) -> Result<Vec<RealPoint>> {
    let system: Vec<P> = system.iter().filter(|p| !p.is_zero()).cloned().collect();
    if system.is_empty() {
        return Err(Error::UnsupportedSystem("empty system".into()));
    }
    let vars: Vec<String> = {
        let all = common_vars(&system);
        let used: Vec<String> = system.iter().flat_map(|p| p.used_vars()).collect();
        all.into_iter().filter(|v| used.contains(v)).collect()
    };
    let system: Vec<P> = system.iter().map(|p| p.with_vars(&vars)).collect::<Result<_>>()?;
    if vars.is_empty() {
        // only nonzero constants: inconsistent
        return Ok(Vec::new());
    }
    let mut per_var: Vec<Vec<Interval>> = Vec::new();
    for v in &vars {
        let mut order: Vec<String> = vars.iter().filter(|w| *w != v).cloned().collect();
        order.push(v.clone());
        let gb = groebner_basis(&system, &order, budget)?;
        if gb.iter().any(|g| g.is_constant()) {
            return Ok(Vec::new());
        }
        let elim = gb
            .iter()
            .find(|g| g.used_vars() == vec![v.clone()])
            .ok_or_else(|| Error::UnsupportedSystem(format!("system is not zero-dimensional in {v}")))?;
        let one = elim.with_vars(&[v.clone()])?;
        per_var.push(real_roots_univariate(&one, &OpenInterval::all(), width)?);
    }
    let mut boxes: Vec<Vec<Interval>> = vec![Vec::new()];
    for roots in &per_var {
        let mut next = Vec::new();
        for b in &boxes {
            for r in roots {
                let mut nb = b.clone();
                nb.push(r.clone());
                // prune early with generators that only involve fixed variables
                let k = nb.len();
                let ok = system.iter().all(|g| {
                    let involves_later = g.used_vars().iter().any(|u| vars.iter().position(|w| w == u).unwrap() >= k);
                    if involves_later {
                        return true;
                    }
                    let mut full = nb.clone();
                    full.resize(vars.len(), Interval::point(Rational::zero()));
                    Interval::eval_poly(g, &full).contains_zero()
                });
                if ok {
                    next.push(nb);
                }
            }
        }
        boxes = next;
    }
    Ok(boxes
        .into_iter()
        .filter(|b| system.iter().all(|g| Interval::eval_poly(g, b).contains_zero()))
        .map(|b| RealPoint { coordinates: vars.iter().cloned().zip(b).collect(), certified: true })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var_names;
    use crate::algebra::rational::int;

    fn x(t: &str) -> P {
        P::parse(t, &var_names(&["x"])).unwrap()
    }

    #[test]
    fn sqrt_two_on_positive_axis() {
        let r = real_roots_univariate(&x("x^2 + -2"), &OpenInterval::positive(), 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].mid_f64() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cubic_with_one_negative_root() {
        // (x-1)(x-3)(x+5)
        let r = real_roots_univariate(&x("x^3 + x^2 + -17*x + 15"), &OpenInterval::positive(), 1e-10).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].contains(&int(1)) && r[1].contains(&int(3)));
        assert!(r.iter().all(|iv| iv.width_f64() <= 1e-10));
    }

    #[test]
    fn repeated_roots_are_reported_once() {
        let r = real_roots_univariate(&x("x^3 + -2*x^2 + x"), &OpenInterval::all(), 1e-10).unwrap();
        let mids: Vec<f64> = r.iter().map(Interval::mid_f64).collect();
        assert_eq!(mids.len(), 2);
        assert!(mids[0].abs() < 1e-10 && (mids[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_polynomial_is_degenerate() {
        assert!(matches!(
            real_roots_univariate(&x("0"), &OpenInterval::all(), 1e-10),
            Err(Error::DegeneratePolynomial)
        ));
    }

    #[test]
    fn open_domain_excludes_endpoints() {
        let r = real_roots_univariate(&x("x^2 + -1"), &OpenInterval::between(int(-1), int(1)), 1e-10).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn solve_square_root_system() {
        let v = var_names(&["x", "y"]);
        let sys = [P::parse("x^2 + -2", &v).unwrap(), P::parse("y + -1", &v).unwrap()];
        let pts = real_solve(&sys, 1e-12, Budget::default()).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert!((p.mid_f64("x").unwrap().abs() - 2f64.sqrt()).abs() < 1e-12);
            assert_eq!(p.mid_f64("y").unwrap(), 1.0);
            assert!(p.get("x").unwrap().width() <= rational::approximate(1e-12, 60));
        }
    }

    #[test]
    fn solve_without_real_points() {
        let v = var_names(&["x", "y"]);
        let sys = [P::parse("x^2 + 1", &v).unwrap(), P::parse("y", &v).unwrap()];
        assert!(real_solve(&sys, 1e-12, Budget::default()).unwrap().is_empty());
    }

    #[test]
    fn solve_circle_and_line() {
        let v = var_names(&["x", "y"]);
        let sys = [P::parse("x^2 + y^2 + -1", &v).unwrap(), P::parse("x + -1*y", &v).unwrap()];
        let pts = real_solve(&sys, 1e-12, Budget::default()).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert!((p.mid_f64("x").unwrap() - p.mid_f64("y").unwrap()).abs() < 1e-11);
        }
    }
}
