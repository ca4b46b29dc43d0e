//! Buchberger's algorithm over the rationals in lexicographic order, with
//! the Gebauer–Möller pair criteria and a deterministic work budget.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{Monomial, Poly};
use super::rational::Rational;
use crate::error::{Error, Result};

type P = Poly<Rational>;

/// Work limits. Reduction and term counts are deterministic; the optional
/// wall-clock limit is not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_reductions: usize,
    pub max_terms: usize,
    /// Largest coefficient size (numerator plus denominator bits) allowed
    /// to appear during reduction.
    pub max_coeff_bits: u64,
    pub max_seconds: Option<f64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_reductions: 5_000, max_terms: 4_000, max_coeff_bits: 4_096, max_seconds: None }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { max_reductions: usize::MAX, max_terms: usize::MAX, max_coeff_bits: u64::MAX, max_seconds: None }
    }
}

#[derive(Clone, Debug)]
struct GPoly {
    /// descending lex order, monic
    terms: Vec<(Monomial, Rational)>,
}

impl GPoly {
    fn lt(&self) -> &Monomial {
        &self.terms[0].0
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

fn deg(m: &[u32]) -> u32 {
    m.iter().sum()
}

fn to_map(p: &GPoly) -> BTreeMap<Monomial, Rational> {
    p.terms.iter().cloned().collect()
}

fn from_map(m: BTreeMap<Monomial, Rational>) -> Option<GPoly> {
    if m.is_empty() {
        return None;
    }
    let mut terms: Vec<_> = m.into_iter().rev().collect();
    let lc = terms[0].1.clone();
    if !lc.is_one() {
        let inv = lc.recip();
        for t in &mut terms {
            t.1 = &t.1 * &inv;
        }
    }
    Some(GPoly { terms })
}

fn sub_scaled(acc: &mut BTreeMap<Monomial, Rational>, g: &GPoly, shift: &[u32], c: &Rational) {
    for (e, v) in &g.terms {
        let ne: Monomial = e.iter().zip(shift).map(|(a, b)| a + b).collect();
        let delta = v * c;
        match acc.get_mut(&ne) {
            Some(x) => {
                *x -= &delta;
                if x.is_zero() {
                    acc.remove(&ne);
                }
            }
            None => {
                acc.insert(ne, -delta);
            }
        }
    }
}

struct Engine {
    polys: Vec<GPoly>,
    active: Vec<bool>,
    pairs: Vec<(usize, usize, Monomial)>,
    reductions: usize,
    budget: Budget,
    start: Instant,
}

impl Engine {
    fn check_budget(&self, terms: usize) -> bool {
        if self.reductions > self.budget.max_reductions || terms > self.budget.max_terms {
            return false;
        }
        if let Some(s) = self.budget.max_seconds {
            if self.start.elapsed() > Duration::from_secs_f64(s) {
                return false;
            }
        }
        true
    }

    /// Full reduction against the active basis.
    fn reduce(&mut self, mut acc: BTreeMap<Monomial, Rational>) -> std::result::Result<Option<GPoly>, ()> {
        let mut done: BTreeMap<Monomial, Rational> = BTreeMap::new();
        while let Some((e, c)) = acc.pop_last() {
            let reducer = (0..self.polys.len()).find(|&i| self.active[i] && divides(self.polys[i].lt(), &e));
            match reducer {
                Some(i) => {
                    let g = &self.polys[i];
                    let shift: Monomial = e.iter().zip(g.lt()).map(|(a, b)| a - b).collect();
                    // leading term cancels exactly; skip it
                    let tail = GPoly { terms: g.terms[1..].to_vec() };
                    if c.numer().bits() + c.denom().bits() > self.budget.max_coeff_bits {
                        return Err(());
                    }
                    sub_scaled(&mut acc, &tail, &shift, &c);
                    self.reductions += 1;
                    if !self.check_budget(acc.len() + done.len()) {
                        return Err(());
                    }
                }
                None => {
                    done.insert(e, c);
                }
            }
        }
        Ok(from_map(done))
    }

    fn spoly(&self, i: usize, j: usize) -> BTreeMap<Monomial, Rational> {
        let (f, g) = (&self.polys[i], &self.polys[j]);
        let l = lcm(f.lt(), g.lt());
        let sf: Monomial = l.iter().zip(f.lt()).map(|(a, b)| a - b).collect();
        let sg: Monomial = l.iter().zip(g.lt()).map(|(a, b)| a - b).collect();
        let mut acc = BTreeMap::new();
        sub_scaled(&mut acc, f, &sf, &-Rational::one());
        sub_scaled(&mut acc, g, &sg, &Rational::one());
        acc
    }

    /// Gebauer–Möller update with new basis element `h`.
    fn update(&mut self, h: GPoly) {
        let hi = self.polys.len();
        let hlt = h.lt().clone();
        self.polys.push(h);
        self.active.push(true);

        let cands: Vec<(usize, Monomial)> = (0..hi)
            .filter(|&g| self.active[g])
            .map(|g| (g, lcm(&hlt, self.polys[g].lt())))
            .collect();
        // chain criterion among the new pairs
        let mut keep = Vec::new();
        for (k, (g, l)) in cands.iter().enumerate() {
            let cop = coprime(&hlt, self.polys[*g].lt());
            let dominated = cands.iter().enumerate().any(|(m, (_, l2))| {
                m != k && divides(l2, l) && (l2 != l || m < k)
            });
            if cop || !dominated {
                keep.push((*g, l.clone(), cop));
            }
        }
        // product criterion
        let new_pairs: Vec<(usize, usize, Monomial)> =
            keep.into_iter().filter(|(_, _, cop)| !cop).map(|(g, l, _)| (g, hi, l)).collect();

        // drop old pairs made redundant by h
        let polys = &self.polys;
        self.pairs.retain(|(a, b, l)| {
            !(divides(&hlt, l)
                && &lcm(polys[*a].lt(), &hlt) != l
                && &lcm(polys[*b].lt(), &hlt) != l)
        });
        self.pairs.extend(new_pairs);

        for g in 0..hi {
            if self.active[g] && divides(&hlt, self.polys[g].lt()) {
                self.active[g] = false;
            }
        }
    }

    fn next_pair(&mut self) -> Option<(usize, usize)> {
        if self.pairs.is_empty() {
            return None;
        }
        let best = (0..self.pairs.len())
            .min_by(|&x, &y| {
                let (a, b, l) = &self.pairs[x];
                let (c, d, m) = &self.pairs[y];
                deg(l).cmp(&deg(m)).then_with(|| l.cmp(m)).then_with(|| (a, b).cmp(&(c, d)))
            })
            .expect("nonempty");
        let (a, b, _) = self.pairs.swap_remove(best);
        Some((a, b))
    }

    fn basis_polys(&self) -> Vec<GPoly> {
        (0..self.polys.len()).filter(|&i| self.active[i]).map(|i| self.polys[i].clone()).collect()
    }
}

fn to_gpoly(p: &P, order: &[String]) -> Result<Option<GPoly>> {
    let q = p.with_vars(order)?;
    Ok(from_map(q.terms().map(|(e, c)| (e.clone(), c.clone())).collect()))
}

fn from_gpoly(g: &GPoly, order: &[String]) -> P {
    P::from_terms(order.to_vec(), g.terms.iter().cloned()).expect("valid terms")
}

/// Reduced Gröbner basis in lex order with `order[0]` most significant.
pub fn groebner_basis(generators: &[P], order: &[String], budget: Budget) -> Result<Vec<P>> {
    let mut eng = Engine {
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        reductions: 0,
        budget,
        start: Instant::now(),
    };
    let partial = |eng: &Engine| -> Error {
        Error::EliminationBudgetExceeded { partial: eng.basis_polys().iter().map(|g| from_gpoly(g, order)).collect() }
    };
    let mut inputs: Vec<GPoly> = Vec::new();
    for g in generators {
        if let Some(gp) = to_gpoly(g, order)? {
            inputs.push(gp);
        }
    }
    // small leading terms first
    inputs.sort_by(|a, b| a.lt().cmp(b.lt()));
    for g in inputs {
        match eng.reduce(to_map(&g)) {
            Ok(Some(h)) => eng.update(h),
            Ok(None) => {}
            Err(()) => return Err(partial(&eng)),
        }
    }
    while let Some((i, j)) = eng.next_pair() {
        let s = eng.spoly(i, j);
        match eng.reduce(s) {
            Ok(Some(h)) => {
                if h.terms.len() > eng.budget.max_terms {
                    return Err(partial(&eng));
                }
                eng.update(h);
            }
            Ok(None) => {}
            Err(()) => return Err(partial(&eng)),
        }
    }
    // interreduce the minimal basis
    let mut basis = eng.basis_polys();
    basis.sort_by(|a, b| a.lt().cmp(b.lt()));
    let mut reduced: Vec<GPoly> = Vec::new();
    for i in 0..basis.len() {
        let others: Vec<GPoly> = basis.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        let mut terms = vec![basis[i].terms[0].clone()];
        terms.extend(normal_form_raw(&others, basis[i].terms[1..].iter().cloned().collect()).into_iter().rev());
        reduced.push(GPoly { terms });
    }
    reduced.sort_by(|a, b| a.lt().cmp(b.lt()));
    Ok(reduced.iter().map(|g| from_gpoly(g, order)).collect())
}

/// Full reduction by `polys` (all monic), without renormalizing.
fn normal_form_raw(polys: &[GPoly], mut acc: BTreeMap<Monomial, Rational>) -> BTreeMap<Monomial, Rational> {
    let mut done = BTreeMap::new();
    while let Some((e, c)) = acc.pop_last() {
        match polys.iter().find(|g| divides(g.lt(), &e)) {
            Some(r) => {
                let shift: Monomial = e.iter().zip(r.lt()).map(|(a, b)| a - b).collect();
                let tail = GPoly { terms: r.terms[1..].to_vec() };
                sub_scaled(&mut acc, &tail, &shift, &c);
            }
            None => {
                done.insert(e, c);
            }
        }
    }
    done
}

/// Normal form of `f` with respect to a Gröbner basis.
pub fn reduce(f: &P, basis: &[P], order: &[String]) -> Result<P> {
    let polys: Vec<GPoly> = basis.iter().filter_map(|b| to_gpoly(b, order).transpose()).collect::<Result<_>>()?;
    let q = f.with_vars(order)?;
    let done = normal_form_raw(&polys, q.terms().map(|(e, c)| (e.clone(), c.clone())).collect());
    P::from_terms(order.to_vec(), done)
}

/// Variable order for eliminating `eliminate`: those first, then the rest
/// in their original order.
pub fn elimination_order(vars: &[String], eliminate: &[&str]) -> Vec<String> {
    let mut order: Vec<String> = eliminate.iter().map(|s| s.to_string()).collect();
    order.extend(vars.iter().filter(|v| !eliminate.contains(&v.as_str())).cloned());
    order
}

/// Generators of the elimination ideal `⟨generators⟩ ∩ k[remaining vars]`,
/// from a lex basis with the eliminated variables ranked highest.
pub fn groebner_elimination(generators: &[P], eliminate: &[&str], budget: Budget) -> Result<Vec<P>> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    let vars = super::gcd::common_vars(generators);
    for e in eliminate {
        if !vars.iter().any(|v| v == e) {
            return Err(Error::UnknownVariable(e.to_string()));
        }
    }
    let order = elimination_order(&vars, eliminate);
    let gb = groebner_basis(generators, &order, budget)?;
    let rest: Vec<String> = order[eliminate.len()..].to_vec();
    Ok(gb
        .into_iter()
        .filter(|g| eliminate.iter().all(|e| g.degree(e) == 0))
        .map(|g| g.with_vars(&rest).expect("no eliminated variable"))
        .collect())
}

/// Krull dimension of the ideal with the given basis, read off the leading
/// monomials: the largest set of variables no leading monomial is
/// purely supported on. `None` for the unit ideal.
pub fn dimension_from_basis(basis: &[P], order: &[String]) -> Option<usize> {
    let lts: Vec<Monomial> = basis
        .iter()
        .filter(|b| !b.is_zero())
        .map(|b| b.with_vars(order).expect("basis over order").leading_term().expect("nonzero").0.clone())
        .collect();
    if lts.iter().any(|m| m.iter().all(|&k| k == 0)) {
        return None;
    }
    let n = order.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        // subset S (bits set) is independent if no leading monomial uses only S
        let independent = lts.iter().all(|m| m.iter().enumerate().any(|(i, &k)| k > 0 && mask & (1 << i) == 0));
        if independent {
            best = best.max(mask.count_ones() as usize);
        }
    }
    Some(best)
}
