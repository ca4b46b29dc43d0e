//! Splitting a plane variety into its curve part and its finite part.
//!
//! For generators `f_i` in at most two variables with `h = gcd(f_i)`, the
//! variety is `V(h) ∪ V(f_1/h, …, f_n/h)`. The first piece is a curve (or
//! empty), and since the cofactors share no common factor the second is
//! finite.

use serde::{Deserialize, Serialize};

use super::gcd::{common_vars, gcd_all, squarefree_part};
use super::groebner::{dimension_from_basis, groebner_basis, Budget};
use super::poly::Poly;
use super::rational::Rational;
use crate::error::{Error, Result};

type P = Poly<Rational>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    /// Reduced lex Gröbner basis of the component.
    pub generators: Vec<P>,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub vars: Vec<String>,
    pub components: Vec<Component>,
}

impl Decomposition {
    pub fn zero_dimensional(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.dimension == 0)
    }
}

pub fn decompose_zero_dimensional(generators: &[P], budget: Budget) -> Result<Decomposition> {
    let gens: Vec<P> = generators.iter().filter(|g| !g.is_zero()).cloned().collect();
    let vars: Vec<String> = {
        let all = common_vars(generators);
        let used: Vec<String> = gens.iter().flat_map(|p| p.used_vars()).collect();
        all.into_iter().filter(|v| used.contains(v)).collect()
    };
    if vars.len() > 2 {
        return Err(Error::UnsupportedSystem(format!("{} variables; at most 2 supported", vars.len())));
    }
    if gens.is_empty() {
        return Ok(Decomposition { vars, components: Vec::new() });
    }
    let gens: Vec<P> = gens.iter().map(|g| g.with_vars(&vars)).collect::<Result<_>>()?;
    let classify = |polys: &[P]| -> Result<Option<Component>> {
        let gb = groebner_basis(polys, &vars, budget).map_err(|e| match e {
            Error::EliminationBudgetExceeded { .. } => Error::DecompositionBudgetExceeded,
            other => other,
        })?;
        Ok(dimension_from_basis(&gb, &vars).map(|dimension| Component { generators: gb, dimension }))
    };

    let mut components = Vec::new();
    let h = gcd_all(&gens).expect("nonempty");
    if h.is_constant() {
        components.extend(classify(&gens)?);
    } else {
        components.extend(classify(&[squarefree_part(&h)])?);
        let cofactors: Vec<P> = gens.iter().map(|g| g.div_exact(&h).expect("gcd divides")).collect();
        components.extend(classify(&cofactors)?);
    }
    Ok(Decomposition { vars, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var_names;

    fn p(t: &str) -> P {
        P::parse(t, &var_names(&["x", "y"])).unwrap()
    }

    #[test]
    fn line_with_embedded_origin() {
        let d = decompose_zero_dimensional(&[p("x*y"), p("x^2")], Budget::default()).unwrap();
        assert_eq!(d.components.len(), 2);
        let curve = d.components.iter().find(|c| c.dimension == 1).unwrap();
        assert_eq!(curve.generators, vec![p("x")]);
        let pt = d.zero_dimensional().next().unwrap();
        assert!(pt.generators.contains(&p("x")) && pt.generators.contains(&p("y")));
    }

    #[test]
    fn two_points() {
        let d = decompose_zero_dimensional(&[p("x^2 + -1"), p("y")], Budget::default()).unwrap();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].dimension, 0);
    }

    #[test]
    fn unit_ideal_has_no_components() {
        let d = decompose_zero_dimensional(&[p("x"), p("x + 1")], Budget::default()).unwrap();
        assert!(d.components.is_empty());
    }

    #[test]
    fn three_variables_rejected() {
        let v = var_names(&["x", "y", "z"]);
        let g = P::parse("x*y*z + 1", &v).unwrap();
        assert!(matches!(decompose_zero_dimensional(&[g], Budget::default()), Err(Error::UnsupportedSystem(_))));
    }
}
