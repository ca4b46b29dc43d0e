//! Multivariate gcd over the rationals by recursive primitive remainder
//! sequences, and the content/squarefree helpers built on it.

use num_traits::{One, Zero};

use super::poly::{union_vars, Poly};
use super::rational::{int, Rational};

type P = Poly<Rational>;

fn one_like(p: &P) -> P {
    P::constant(p.vars().to_vec(), Rational::one())
}

/// Highest-indexed variable occurring in either polynomial.
fn main_var(f: &P, g: &P) -> Option<String> {
    (0..f.vars().len()).rev().find(|&i| f.degree_at(i) > 0 || g.degree_at(i) > 0).map(|i| f.vars()[i].clone())
}

/// Pseudo-remainder of `a` by `b` with respect to `var`.
pub fn pseudo_remainder(a: &P, b: &P, var: &str) -> P {
    let db = b.degree(var);
    let bc = b.coefficients_in(var);
    let lc_b = bc.get(&db).cloned().expect("leading coefficient");
    let idx = a.var_index(var).expect("variable present");
    let mut r = a.clone();
    while !r.is_zero() && r.degree(var) >= db {
        let dr = r.degree(var);
        let lc_r = r.coefficients_in(var).remove(&dr).expect("leading coefficient");
        let mut shift = vec![0; r.vars().len()];
        shift[idx] = dr - db;
        let t = (&lc_r * b).mul_monomial(&shift, &Rational::one());
        r = &(&lc_b * &r) - &t;
    }
    r
}

/// Gcd of the coefficients of `f` viewed as a polynomial in `var`.
pub fn content_in(f: &P, var: &str) -> P {
    let mut g = P::zero(f.vars().to_vec());
    for c in f.coefficients_in(var).values() {
        g = gcd(&g, c);
        if g.is_constant() {
            return one_like(f);
        }
    }
    g
}

pub fn primitive_part_in(f: &P, var: &str) -> P {
    if f.is_zero() {
        return f.clone();
    }
    let c = content_in(f, var);
    f.div_exact(&c).expect("content divides")
}

const PROBES: [i64; 12] = [3, -5, 7, 11, -13, 17, 2, -19, 23, -29, 31, 37];

/// Substitute small integers for every variable but `x`, keeping the degree
/// in `x` of each polynomial. `None` if no probe keeps all degrees.
fn specialize(polys: &[&P], x: &str) -> Option<Vec<P>> {
    let others: Vec<String> = polys[0].vars().iter().filter(|v| v.as_str() != x).cloned().collect();
    for attempt in 0..PROBES.len() {
        let out: Vec<P> = polys
            .iter()
            .map(|p| {
                others.iter().enumerate().fold((*p).clone(), |acc, (k, v)| {
                    acc.partial_eval(v, &int(PROBES[(attempt + 5 * k) % PROBES.len()]))
                })
            })
            .collect();
        if out.iter().zip(polys).all(|(a, p)| a.degree(x) == p.degree(x)) {
            return Some(out);
        }
    }
    None
}

/// Upper bound on the degree in `x` of `gcd(a, b)` from one specialization.
fn gcd_degree_bound(a: &P, b: &P, x: &str) -> Option<u32> {
    let s = specialize(&[a, b], x)?;
    Some(gcd(&s[0], &s[1]).degree(x))
}

/// Monic gcd (lex-leading coefficient one); `gcd(0, 0) = 0`.
pub fn gcd(f: &P, g: &P) -> P {
    let (f, g) = f.align(g);
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let Some(x) = main_var(&f, &g) else {
        return one_like(&f);
    };
    if f.degree(&x) == 0 {
        return gcd(&f, &content_in(&g, &x));
    }
    if g.degree(&x) == 0 {
        return gcd(&content_in(&f, &x), &g);
    }
    let cf = content_in(&f, &x);
    let cg = content_in(&g, &x);
    let c = gcd(&cf, &cg);
    let mut a = f.div_exact(&cf).expect("content divides");
    let mut b = g.div_exact(&cg).expect("content divides");
    if a.degree(&x) < b.degree(&x) {
        std::mem::swap(&mut a, &mut b);
    }
    if a.vars().iter().any(|v| *v != x && (a.degree(v) > 0 || b.degree(v) > 0))
        && gcd_degree_bound(&a, &b, &x) == Some(0)
    {
        return c.monic();
    }
    loop {
        let r = pseudo_remainder(&a, &b, &x);
        if r.is_zero() {
            break;
        }
        if r.degree(&x) == 0 {
            return c.monic();
        }
        a = b;
        b = primitive_part_in(&r.primitive_integer(), &x).primitive_integer();
    }
    (&c * &primitive_part_in(&b, &x)).monic()
}

pub fn gcd_all<'a>(polys: impl IntoIterator<Item = &'a P>) -> Option<P> {
    let mut acc: Option<P> = None;
    for p in polys {
        acc = Some(match acc {
            None => p.monic(),
            Some(a) => gcd(&a, p),
        });
    }
    acc
}

/// Product of the distinct irreducible factors, up to a constant.
pub fn squarefree_part(f: &P) -> P {
    if f.is_zero() || f.is_constant() {
        return f.clone();
    }
    // A squarefree specialization with the same degree in `v` rules out
    // repeated factors involving `v`; what is left lives in the content.
    for v in f.used_vars().into_iter().rev() {
        let Some(s) = specialize(&[f], &v) else { continue };
        if gcd(&s[0], &s[0].derivative(&v)).degree(&v) == 0 {
            let c = content_in(f, &v);
            if c.is_constant() {
                return f.clone();
            }
            return &squarefree_part(&c) * &f.div_exact(&c).expect("content divides");
        }
        break;
    }
    let mut g = f.clone();
    for v in f.used_vars() {
        g = gcd(&g, &f.derivative(&v));
        if g.is_constant() {
            break;
        }
    }
    f.div_exact(&g).expect("gcd divides")
}

/// Drop the variable list entries that are not used.
pub fn compact(f: &P) -> P {
    let used = f.used_vars();
    let vars: Vec<String> = f.vars().iter().filter(|v| used.contains(v)).cloned().collect();
    f.with_vars(&vars).expect("used variables kept")
}

pub fn common_vars(polys: &[P]) -> Vec<String> {
    polys.iter().fold(Vec::new(), |acc, p| union_vars(&acc, p.vars()))
}

pub fn is_unit(p: &P) -> bool {
    p.is_constant() && !p.constant_term().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var_names;

    fn p(t: &str) -> P {
        P::parse(t, &var_names(&["x", "y", "z"])).unwrap()
    }

    #[test]
    fn gcd_of_products() {
        let a = p("x + y");
        let b = p("x^2 + -1*y*z + 3");
        let c = p("z + -2");
        let g = gcd(&(&a * &b), &(&a * &c));
        assert_eq!(g, a.monic());
        let g = gcd(&(&(&a * &a) * &b), &(&(&a * &b) * &c));
        assert_eq!(g, (&a * &b).monic());
    }

    #[test]
    fn coprime_gives_one() {
        let g = gcd(&p("x^2 + y^2 + -1"), &p("x + -1*y"));
        assert!(g.is_constant());
    }

    #[test]
    fn squarefree_removes_repeats() {
        let a = p("x + y");
        let b = p("y + -1*z");
        let f = &(&(&a * &a) * &a) * &b;
        let s = squarefree_part(&f);
        assert_eq!(s.monic(), (&a * &b).monic());
    }

    #[test]
    fn content_in_variable() {
        let f = &p("y^2 + 1") * &p("x*y + z");
        let c = content_in(&f, "x");
        // x*y + z is primitive in x (coefficients y and z coprime)
        assert_eq!(c, p("y^2 + 1"));
    }
}
