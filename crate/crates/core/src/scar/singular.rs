//! Isolated real singular points of the boundary surface, projected to the
//! `(α, β)` plane.
//!
//! Three search paths are tried in order: exact elimination of `δt` with
//! zero-dimensional decomposition, then either a one-dimensional scan over
//! double roots on the unit circle (when the surface comes from the
//! consistent family) or damped Newton iteration from a seed grid.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{self, Rational};
use crate::algebra::roots::OpenInterval;
use crate::algebra::{
    decompose_zero_dimensional, groebner_elimination, real_roots_univariate, real_solve, Budget, ExactPoly,
    Interval, Poly, RealPoint,
};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::num::C;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchPath {
    Exact,
    FamilyScan,
    NumericGrid,
}

/// Seed box and resolution for the generic numeric path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedGrid {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub dt: (f64, f64),
    pub per_axis: usize,
}

impl Default for SeedGrid {
    fn default() -> Self {
        SeedGrid { alpha: (-3.0, 3.0), beta: (-3.0, 3.0), dt: (-1.0, 3.0), per_axis: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularOptions {
    pub budget: Budget,
    /// Width of certified intervals on the exact path.
    pub root_width: f64,
    /// Decay rate of the consistent family that produced `r`, enabling the
    /// unit-circle scan.
    pub family: Option<C<f64>>,
    /// Grid resolution of the unit-circle scan.
    pub scan_points: usize,
    pub grid: SeedGrid,
    /// Skip the exact path.
    pub numeric_only: bool,
}

impl Default for SingularOptions {
    fn default() -> Self {
        SingularOptions {
            budget: Budget::default(),
            root_width: 1e-10,
            family: None,
            scan_points: 20_000,
            grid: SeedGrid::default(),
            numeric_only: false,
        }
    }
}

/// A singular point with its lift to `δt` and the rank of the Hessian of
/// `r` there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub point: RealPoint,
    pub dt: f64,
    pub hessian_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularSet {
    pub points: Vec<SingularPoint>,
    pub path: SearchPath,
    /// Why earlier paths were abandoned.
    pub notes: Vec<String>,
}

impl SingularSet {
    pub fn real_points(&self) -> Vec<RealPoint> {
        self.points.iter().map(|p| p.point.clone()).collect()
    }
}

/// Relative size below which a residual counts as zero.
const RESIDUAL_TOL: f64 = 1e-8;
/// Relative eigenvalue size below which a Hessian direction is null.
const RANK_TOL: f64 = 1e-7;

const VARS: [&str; 3] = ["alpha", "beta", "dt"];

struct Derivatives {
    r: ExactPoly,
    grad: [ExactPoly; 3],
    hess: [[ExactPoly; 3]; 3],
}

impl Derivatives {
    fn new(r: &ExactPoly) -> Result<Self> {
        let vars: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
        let r = r.with_vars(&vars)?;
        let grad = VARS.map(|v| r.derivative(v));
        let hess = [0, 1, 2].map(|i| VARS.map(|v| grad[i].derivative(v)));
        Ok(Derivatives { r, grad, hess })
    }

    fn system(&self) -> Vec<ExactPoly> {
        std::iter::once(self.r.clone()).chain(self.grad.iter().cloned()).filter(|p| !p.is_zero()).collect()
    }
}

fn exact_point(x: &[f64; 3]) -> Vec<Rational> {
    x.iter().map(|v| rational::from_f64_exact(*v).expect("finite coordinate")).collect()
}

/// `|p(x)|` divided by `Σ |c_e| Π max(|x_i|, 1)^{e_i}`, a size for `p` near
/// `x` that does not collapse when some coordinates are tiny.
pub fn relative_residual(p: &ExactPoly, x: &[Rational]) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    let mag: Vec<f64> = x.iter().map(|v| rational::to_f64(v).abs().max(1.0)).collect();
    let scale: f64 = p
        .terms()
        .map(|(e, c)| rational::to_f64(c).abs() * e.iter().zip(&mag).map(|(k, m)| m.powi(*k as i32)).product::<f64>())
        .sum();
    rational::to_f64(&p.eval(x)).abs() / scale
}

fn is_singular(d: &Derivatives, x: &[f64; 3]) -> bool {
    let q = exact_point(x);
    relative_residual(&d.r, &q) < RESIDUAL_TOL && d.grad.iter().all(|g| relative_residual(g, &q) < RESIDUAL_TOL)
}

/// Numerical rank of the Hessian of `r` at `x`.
fn hessian_rank(d: &Derivatives, x: &[f64; 3]) -> usize {
    let q = exact_point(x);
    let h: Vec<Vec<f64>> =
        (0..3).map(|i| (0..3).map(|j| rational::to_f64(&d.hess[i][j].eval(&q))).collect()).collect();
    let ev = symmetric_eigenvalues(h);
    let top = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 || !top.is_finite() {
        return 0;
    }
    ev.iter().filter(|v| v.abs() > RANK_TOL * top).count()
}

fn make_point(alpha: f64, beta: f64, radius: f64, certified: bool) -> RealPoint {
    let mut coordinates = BTreeMap::new();
    coordinates.insert("alpha".to_string(), Interval::around(alpha, radius * alpha.abs().max(1.0)));
    coordinates.insert("beta".to_string(), Interval::around(beta, radius * beta.abs().max(1.0)));
    RealPoint { coordinates, certified }
}

/// Keep points that are not on a curve of singular points (Hessian rank 2
/// marks two smooth sheets crossing along a curve), dropping near-duplicates.
fn classify_and_dedupe(d: &Derivatives, found: Vec<[f64; 3]>, radius: f64, certified: bool) -> Vec<SingularPoint> {
    let mut out: Vec<(SingularPoint, [f64; 3])> = Vec::new();
    for x in found {
        if out.iter().any(|(_, y)| close(&x, y)) {
            continue;
        }
        let rank = hessian_rank(d, &x);
        if rank == 2 {
            continue;
        }
        out.push((SingularPoint { point: make_point(x[0], x[1], radius, certified), dt: x[2], hessian_rank: rank }, x));
    }
    out.sort_by(|a, b| {
        (a.1[0], a.1[1], a.1[2]).partial_cmp(&(b.1[0], b.1[1], b.1[2])).expect("finite coordinates")
    });
    out.into_iter().map(|(p, _)| p).collect()
}

fn close(a: &[f64; 3], b: &[f64; 3]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-6 * x.abs().max(y.abs()).max(1.0))
}

/// Isolated real solutions of `r = ∂r/∂α = ∂r/∂β = ∂r/∂δt = 0`, projected to
/// `(α, β)`. Points on curves of singular points are excluded.
pub fn singular_points(r: &ExactPoly, opts: &SingularOptions) -> Result<SingularSet> {
    let d = Derivatives::new(r)?;
    let mut notes = Vec::new();
    if !opts.numeric_only {
        match exact_path(&d, opts) {
            Ok(points) if !points.is_empty() => {
                return Ok(SingularSet { points, path: SearchPath::Exact, notes });
            }
            Ok(_) => notes.push("exact path: no isolated real point".to_string()),
            Err(e) => notes.push(format!("exact path: {e}")),
        }
    }
    let (points, path) = match opts.family {
        Some(lambda) => (family_scan(&d, lambda, opts.scan_points), SearchPath::FamilyScan),
        None => (grid_search(&d, &opts.grid), SearchPath::NumericGrid),
    };
    if points.is_empty() {
        return Err(Error::NoSingularCandidates);
    }
    Ok(SingularSet { points, path, notes })
}

fn exact_path(d: &Derivatives, opts: &SingularOptions) -> Result<Vec<SingularPoint>> {
    let j = groebner_elimination(&d.system(), &["dt"], opts.budget)?;
    let j: Vec<ExactPoly> = j.into_iter().filter(|p| !p.is_constant()).collect();
    if j.is_empty() {
        return Ok(Vec::new());
    }
    let dec = decompose_zero_dimensional(&j, opts.budget)?;
    let mut lifted = Vec::new();
    for comp in dec.zero_dimensional() {
        for pt in real_solve(&comp.generators, opts.root_width, opts.budget)? {
            let (Some(a), Some(b)) = (pt.get("alpha"), pt.get("beta")) else { continue };
            let (am, bm) = (a.mid(), b.mid());
            let fiber = d.grad[2].partial_eval("alpha", &am).partial_eval("beta", &bm);
            let dts: Vec<f64> = if fiber.is_zero() {
                let r_fiber = d.r.partial_eval("alpha", &am).partial_eval("beta", &bm);
                roots_f64(&r_fiber, opts.root_width)
            } else {
                roots_f64(&fiber, opts.root_width)
            };
            for t in dts {
                let x = [am.clone(), bm.clone()].map(|v| rational::to_f64(&v));
                let x = [x[0], x[1], t];
                if is_singular(d, &x) {
                    lifted.push(x);
                }
            }
        }
    }
    Ok(classify_and_dedupe(d, lifted, opts.root_width, true))
}

fn roots_f64(p: &ExactPoly, width: f64) -> Vec<f64> {
    if p.is_zero() || p.is_constant() {
        return Vec::new();
    }
    real_roots_univariate(p, &OpenInterval::all(), width)
        .map(|v| v.iter().map(Interval::mid_f64).collect())
        .unwrap_or_default()
}

/// Double roots of the family's characteristic polynomial on the unit
/// circle. With `L = λδt` and `Π = sA + B`, `A = L(x−1)²`,
/// `B = L(5x−3)/2 + x²(1−x)`, a double root at `x` forces
/// `L = −2x(x−1)(x−2)/(5x−1)` and `s = −B/A`; `δt = L/λ` must be real.
fn family_scan(d: &Derivatives, lambda: C<f64>, scan_points: usize) -> Vec<SingularPoint> {
    let found: Vec<[f64; 3]> = circle_double_roots(lambda, scan_points)
        .into_iter()
        .filter(|x| is_singular(d, x))
        .collect();
    classify_and_dedupe(d, found, 1e-12, false)
}

/// `(α, β, δt)` of every double root `e^{iθ}`, `θ ∉ {0}`, with `δt ≠ 0`.
pub fn circle_double_roots(lambda: C<f64>, scan_points: usize) -> Vec<[f64; 3]> {
    let l_of = |theta: f64| {
        let x = Complex::from_polar(1.0, theta);
        let one = C::new(1.0, 0.0);
        -(x * (x - one) * (x - 2.0) * 2.0) / (x * 5.0 - one)
    };
    let h = |theta: f64| (l_of(theta) / lambda).im;
    let eps = 1e-6;
    let n = scan_points.max(16);
    let step = (2.0 * std::f64::consts::PI - 2.0 * eps) / n as f64;
    let mut roots = Vec::new();
    let mut prev = (eps, h(eps));
    for k in 1..=n {
        let t = eps + step * k as f64;
        let v = h(t);
        if v == 0.0 {
            roots.push(t);
        } else if prev.1 != 0.0 && prev.1.signum() != v.signum() {
            roots.push(bisect(&h, prev.0, t, prev.1));
        }
        prev = (t, v);
    }
    roots
        .into_iter()
        .filter_map(|theta| {
            let x = Complex::from_polar(1.0, theta);
            let l = l_of(theta);
            let dt = (l / lambda).re;
            if dt.abs() < 1e-12 || !dt.is_finite() {
                return None;
            }
            let one = C::new(1.0, 0.0);
            let a = l * (x - one) * (x - one);
            let b = l * (x * 5.0 - 3.0) / 2.0 + x * x * (one - x);
            let s = -b / a;
            Some([s.re, s.im, dt])
        })
        .collect()
}

fn bisect(h: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = h(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

struct FloatSystem {
    f: Vec<Poly<f64>>,
    jac: Vec<[Poly<f64>; 3]>,
}

impl FloatSystem {
    fn new(d: &Derivatives) -> Self {
        let norm = |p: &ExactPoly| {
            let m = p.terms().map(|(_, c)| rational::to_f64(c).abs()).fold(0.0, f64::max);
            p.to_f64().map_coeffs(|c| if m > 0.0 { c / m } else { *c })
        };
        let polys: Vec<ExactPoly> = std::iter::once(d.r.clone()).chain(d.grad.iter().cloned()).collect();
        let f = polys.iter().map(norm).collect();
        let jac = polys
            .iter()
            .map(|p| {
                let m = p.terms().map(|(_, c)| rational::to_f64(c).abs()).fold(0.0, f64::max);
                let m = if m > 0.0 { m } else { 1.0 };
                VARS.map(|v| p.derivative(v).to_f64().map_coeffs(|c| c / m))
            })
            .collect();
        FloatSystem { f, jac }
    }

    fn residual(&self, x: &[f64; 3]) -> Vec<f64> {
        self.f.iter().map(|p| p.eval(x)).collect()
    }

    fn jacobian(&self, x: &[f64; 3]) -> Vec<[f64; 3]> {
        self.jac.iter().map(|row| [row[0].eval(x), row[1].eval(x), row[2].eval(x)]).collect()
    }
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for k in 0..3 {
        let piv = (k..3).max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).expect("finite"))?;
        if m[piv][k].abs() < 1e-300 {
            return None;
        }
        m.swap(k, piv);
        for i in k + 1..3 {
            let f = m[i][k] / m[k][k];
            for j in k..4 {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][3] - s) / m[i][i];
    }
    Some(x)
}

/// Levenberg–Marquardt on the overdetermined singular system.
fn levenberg_marquardt(sys: &FloatSystem, mut x: [f64; 3]) -> [f64; 3] {
    let cost = |x: &[f64; 3]| sys.residual(x).iter().map(|v| v * v).sum::<f64>();
    let mut mu = 1e-3;
    let mut c = cost(&x);
    for _ in 0..200 {
        if !c.is_finite() || c < 1e-30 {
            break;
        }
        let f = sys.residual(&x);
        let j = sys.jacobian(&x);
        let mut jtj = [[0.0; 3]; 3];
        let mut jtf = [0.0; 3];
        for (row, fi) in j.iter().zip(&f) {
            for a in 0..3 {
                jtf[a] += row[a] * fi;
                for b in 0..3 {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut m = jtj;
            for a in 0..3 {
                m[a][a] += mu * (jtj[a][a] + 1e-12);
            }
            let Some(step) = solve3(m, jtf.map(|v| -v)) else {
                mu *= 10.0;
                continue;
            };
            let trial = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
            let ct = cost(&trial);
            if ct.is_finite() && ct < c {
                x = trial;
                c = ct;
                mu = (mu / 3.0).max(1e-12);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    x
}

fn grid_search(d: &Derivatives, grid: &SeedGrid) -> Vec<SingularPoint> {
    let sys = FloatSystem::new(d);
    let n = grid.per_axis.max(2);
    let at = |(lo, hi): (f64, f64), k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    let seeds: Vec<[f64; 3]> = (0..n * n * n)
        .map(|k| [at(grid.alpha, k / (n * n)), at(grid.beta, (k / n) % n), at(grid.dt, k % n)])
        .collect();
    let found: Vec<[f64; 3]> = seeds
        .par_iter()
        .map(|s| levenberg_marquardt(&sys, *s))
        .filter(|x| x.iter().all(|v| v.is_finite()) && is_singular(d, x))
        .collect();
    classify_and_dedupe(d, found, 1e-8, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::var_names;

    fn fixture() -> ExactPoly {
        // isolated real zero at (1/2, -1/3, 1) plus a smooth real sheet elsewhere
        let v = var_names(&VARS);
        let p = |t: &str| ExactPoly::parse(t, &v).unwrap();
        let sq = p("alpha^2 + -1*alpha + 1/4 + beta^2 + 2/3*beta + 1/9 + dt^2 + -2*dt + 1");
        &sq * &p("alpha + beta + dt + 3")
    }

    #[test]
    fn planted_point_exact() {
        let s = singular_points(&fixture(), &SingularOptions::default()).unwrap();
        assert_eq!(s.path, SearchPath::Exact);
        assert_eq!(s.points.len(), 1);
        let p = &s.points[0];
        assert!((p.point.mid_f64("alpha").unwrap() - 0.5).abs() < 1e-8);
        assert!((p.point.mid_f64("beta").unwrap() + 1.0 / 3.0).abs() < 1e-8);
        assert!((p.dt - 1.0).abs() < 1e-8);
        assert_eq!(p.hessian_rank, 3);
    }

    #[test]
    fn planted_point_numeric_agrees() {
        let opts = SingularOptions { numeric_only: true, ..Default::default() };
        let s = singular_points(&fixture(), &opts).unwrap();
        assert_eq!(s.path, SearchPath::NumericGrid);
        assert_eq!(s.points.len(), 1);
        assert!((s.points[0].point.mid_f64("alpha").unwrap() - 0.5).abs() < 1e-6);
        assert!((s.points[0].point.mid_f64("beta").unwrap() + 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn real_lambda_double_root_at_minus_one() {
        let pts = circle_double_roots(C::new(-1.0, 0.0), 4000);
        assert!(pts.iter().any(|x| (x[0] - 1.25).abs() < 1e-9 && x[1].abs() < 1e-9 && (x[2] - 2.0).abs() < 1e-9));
    }
}
