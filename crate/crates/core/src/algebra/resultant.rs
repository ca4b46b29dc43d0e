//! Sylvester resultants with fraction-free (Bareiss) determinants.


use super::poly::Poly;
use super::rational::Rational;
use crate::error::{Error, Result};

type P = Poly<Rational>;

/// Sylvester matrix of `f` and `g` with respect to `var`; entries are
/// polynomials in the remaining variables.
pub fn sylvester_matrix(f: &P, g: &P, var: &str) -> Result<Vec<Vec<P>>> {
    let (f, g) = f.align(g);
    let m = f.degree(var);
    let n = g.degree(var);
    if m == 0 {
        return Err(Error::NothingToEliminate(var.to_string()));
    }
    if n == 0 {
        return Err(Error::NothingToEliminate(var.to_string()));
    }
    let rest: Vec<String> = f.vars().iter().filter(|v| v.as_str() != var).cloned().collect();
    let coeffs = |p: &P, d: u32| -> Result<Vec<P>> {
        let map = p.coefficients_in(var);
        (0..=d)
            .rev()
            .map(|k| match map.get(&k) {
                Some(c) => c.with_vars(&rest),
                None => Ok(P::zero(rest.clone())),
            })
            .collect()
    };
    let fc = coeffs(&f, m)?;
    let gc = coeffs(&g, n)?;
    let size = (m + n) as usize;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n as usize {
        let mut row = vec![P::zero(rest.clone()); size];
        for (j, c) in fc.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m as usize {
        let mut row = vec![P::zero(rest.clone()); size];
        for (j, c) in gc.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Determinant by Bareiss fraction-free elimination. Every intermediate
/// division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<P>>) -> P {
    let n = m.len();
    let vars = m[0][0].vars().to_vec();
    if n == 0 {
        return P::constant(vars, Rational::from_integer(1.into()));
    }
    let mut negate = false;
    let mut prev: Option<P> = None;
    for k in 0..n {
        if m[k][k].is_zero() {
            // prefer the sparsest available pivot
            let swap = (k + 1..n).filter(|&i| !m[i][k].is_zero()).min_by_key(|&i| m[i][k].num_terms());
            match swap {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return P::zero(vars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = match &prev {
                    Some(d) => num.div_exact(d).expect("Bareiss division is exact"),
                    None => num,
                };
            }
            m[i][k] = P::zero(vars.clone());
        }
        prev = Some(m[k][k].clone());
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Resultant of `f` and `g` with respect to `var`. The result is expressed
/// over the remaining variables.
pub fn resultant(f: &P, g: &P, var: &str) -> Result<P> {
    let m = sylvester_matrix(f, g, var)?;
    Ok(bareiss_determinant(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var_names;
    use crate::algebra::rational::int;

    fn p(t: &str, vars: &[&str]) -> P {
        P::parse(t, &var_names(vars)).unwrap()
    }

    #[test]
    fn linear_pair() {
        let r = resultant(&p("x + -1", &["x"]), &p("x + -2", &["x"]), "x").unwrap();
        assert!(r.is_constant());
        assert_eq!(r.constant_term(), int(-1));
    }

    #[test]
    fn eliminates_with_parameter() {
        let r = resultant(&p("x^2 + -1*t", &["x", "t"]), &p("x + -2", &["x", "t"]), "x").unwrap();
        assert_eq!(r, p("4 + -1*t", &["t"]));
        assert_eq!(r.vars(), &var_names(&["t"])[..]);
    }

    #[test]
    fn degree_zero_is_rejected() {
        let e = resultant(&p("t + 1", &["x", "t"]), &p("x + 1", &["x", "t"]), "x");
        assert!(matches!(e, Err(Error::NothingToEliminate(_))));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let v = var_names(&["a"]);
        let e = |t: &str| P::parse(t, &v).unwrap();
        let m = vec![
            vec![e("a"), e("1"), e("2")],
            vec![e("0"), e("a + 1"), e("3")],
            vec![e("1"), e("0"), e("a")],
        ];
        // a*((a+1)*a - 0) - 1*(0*a - 3*1) + 2*(0 - (a+1))
        let expected = e("a^3 + a^2 + -2*a + 1");
        assert_eq!(bareiss_determinant(m), expected);
    }
}
