use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{self, Rational};
use crate::algebra::roots::OpenInterval;
use crate::algebra::{real_roots_univariate, ExactPoly, RealPoint};
use crate::error::{Error, Result};
use crate::num::C;

/// Two `δ̄t` values closer than this are a tie.
pub const TIE_TOL: f64 = 1e-9;

/// A candidate `(α, β)` with the smallest positive root `δ̄t` of
/// `r(α, β, ·)`, or `None` when there is no positive root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub point: RealPoint,
    pub dt_bar: Option<f64>,
}

impl Candidate {
    pub fn s(&self) -> C<f64> {
        C::new(self.point.mid_f64("alpha").unwrap_or(f64::NAN), self.point.mid_f64("beta").unwrap_or(f64::NAN))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub s_hat: C<f64>,
    pub dt_hat: f64,
    pub candidates: Vec<Candidate>,
}

fn mid(p: &RealPoint, var: &str) -> Result<Rational> {
    p.get(var).map(|i| i.mid()).ok_or_else(|| Error::UnknownVariable(var.to_string()))
}

/// Smallest positive root of `r(α, β, δt)` in `δt` at the midpoint of `p`.
pub fn smallest_positive_root(r: &ExactPoly, p: &RealPoint, width: f64) -> Result<Option<f64>> {
    let fiber = r.partial_eval("alpha", &mid(p, "alpha")?).partial_eval("beta", &mid(p, "beta")?);
    if fiber.is_zero() || fiber.degree("dt") == 0 {
        return Ok(None);
    }
    let roots = real_roots_univariate(&fiber, &OpenInterval::positive(), width)?;
    Ok(roots.first().map(|i| rational::to_f64(&i.mid())))
}

/// Maximin choice over `w`: the candidate whose smallest positive `δt`-root
/// is largest. Ties within [`TIE_TOL`] go to smaller `|s|`, then smaller `β`,
/// then smaller `α`.
pub fn select_parameters(r: &ExactPoly, w: &[RealPoint], width: f64) -> Result<Selection> {
    if w.is_empty() {
        return Err(Error::NoSingularCandidates);
    }
    let mut candidates: Vec<Candidate> = w
        .par_iter()
        .map(|p| Ok(Candidate { point: p.clone(), dt_bar: smallest_positive_root(r, p, width)? }))
        .collect::<Result<_>>()?;
    candidates.sort_by(|a, b| {
        let (sa, sb) = (a.s(), b.s());
        (sa.re, sa.im).partial_cmp(&(sb.re, sb.im)).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut best: Option<&Candidate> = None;
    for c in candidates.iter().filter(|c| c.dt_bar.is_some()) {
        best = match best {
            None => Some(c),
            Some(b) if prefer(c, b) => Some(c),
            keep => keep,
        };
    }
    let best = best.ok_or(Error::NoAdmissibleCandidate)?;
    Ok(Selection { s_hat: best.s(), dt_hat: best.dt_bar.expect("admissible"), candidates: candidates.clone() })
}

fn prefer(a: &Candidate, b: &Candidate) -> bool {
    let (da, db) = (a.dt_bar.expect("admissible"), b.dt_bar.expect("admissible"));
    if (da - db).abs() > TIE_TOL {
        return da > db;
    }
    let (sa, sb) = (a.s(), b.s());
    if sa.norm() != sb.norm() {
        return sa.norm() < sb.norm();
    }
    if sa.im != sb.im {
        return sa.im < sb.im;
    }
    sa.re < sb.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var_names;
    use crate::algebra::Interval;
    use std::collections::BTreeMap;

    fn pt(a: f64, b: f64) -> RealPoint {
        let mut coordinates = BTreeMap::new();
        coordinates.insert("alpha".into(), Interval::around(a, 0.0));
        coordinates.insert("beta".into(), Interval::around(b, 0.0));
        RealPoint { coordinates, certified: false }
    }

    fn r() -> ExactPoly {
        // single root δt = 1 + α² − β
        ExactPoly::parse("dt + -1 + -1*alpha^2 + beta", &var_names(&["alpha", "beta", "dt"])).unwrap()
    }

    #[test]
    fn maximin_picks_largest_first_root() {
        let s = select_parameters(&r(), &[pt(0.0, 0.0), pt(2.0, 0.0), pt(1.0, 0.0)], 1e-12).unwrap();
        assert!((s.dt_hat - 5.0).abs() < 1e-9);
        assert_eq!(s.s_hat, C::new(2.0, 0.0));
    }

    #[test]
    fn ties_fall_through_to_alpha() {
        let s = select_parameters(&r(), &[pt(1.0, 0.0), pt(-1.0, 0.0)], 1e-12).unwrap();
        assert_eq!(s.s_hat, C::new(-1.0, 0.0));
    }

    #[test]
    fn inadmissible_everywhere() {
        let e = select_parameters(&r(), &[pt(0.0, 5.0)], 1e-12).unwrap_err();
        assert!(matches!(e, Error::NoAdmissibleCandidate));
    }
}
