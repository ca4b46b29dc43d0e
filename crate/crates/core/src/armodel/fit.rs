//! Regression fits: Yule-Walker least squares, the same with the two
//! consistency equalities imposed, and order selection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{ArModel, Provenance};
use super::series::TimeSeries;
use crate::error::{Error, Result};
use crate::linalg::{lstsq, CMatrix};
use crate::num::{Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub residual_variance: f64,
    pub aic_value: f64,
    pub constrained: bool,
    pub condition_estimate: f64,
}

/// `F(p) = Q̂ (M + p) / (M − p)`.
pub fn aic_criterion(q_hat: f64, m: usize, p: usize) -> f64 {
    q_hat * (m + p) as f64 / (m - p) as f64
}

/// Lagged design on anomalies: row `j` is `(d_j, …, d_{j+p−1})`, target
/// `d_{j+p}`.
fn design<T: Real>(d: &[C<T>], p: usize) -> (CMatrix<T>, Vec<C<T>>) {
    let m = d.len();
    let rows: Vec<Vec<C<T>>> = (0..m - p).map(|j| d[j..j + p].to_vec()).collect();
    let y = d[p..].to_vec();
    (CMatrix::from_rows(&rows), y)
}

fn check_length<T: Real>(series: &TimeSeries<T>, p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidArgument("AR order must be at least 1".into()));
    }
    if series.len() <= 2 * p {
        return Err(Error::InvalidArgument(format!(
            "series of length {} too short for order {p} (need more than {})",
            series.len(),
            2 * p
        )));
    }
    Ok(())
}

fn residual_sqr<T: Real>(x: &CMatrix<T>, y: &[C<T>], a: &[C<T>]) -> T {
    // y − X(a + e_p)
    let p = a.len();
    let mut shifted = a.to_vec();
    shifted[p - 1] = shifted[p - 1] + C::new(T::one(), T::zero());
    x.mul_vec(&shifted).iter().zip(y).map(|(u, v)| (v - u).norm_sqr()).sum()
}

/// Unconstrained least squares `min ‖y − X(a + e_p)‖`. The temporal mean is
/// stored as the model's mean offset; the forcing on anomalies is zero.
pub fn yule_walker_fit<T: Real>(series: &TimeSeries<T>, p: usize) -> Result<(ArModel<T>, FitDiagnostics)> {
    check_length(series, p)?;
    let mean = series.mean();
    let d: Vec<C<T>> = series.values().iter().map(|u| u - mean).collect();
    let (x, y) = design(&d, p);
    let target: Vec<C<T>> = y.iter().zip(&d[p - 1..]).map(|(v, last)| v - last).collect();
    let sol = lstsq(&x, &target)?;
    let m = series.len();
    let q_hat = residual_sqr(&x, &y, &sol.solution) / T::lit((m - p) as f64);
    let model = ArModel::new(sol.solution, q_hat, series.dt())?.with_mean_offset(mean).with_provenance(Provenance::YuleWalker);
    let diag = FitDiagnostics {
        residual_variance: q_hat.as_f64(),
        aic_value: aic_criterion(q_hat.as_f64(), m, p),
        constrained: false,
        condition_estimate: sol.condition_estimate.as_f64(),
    };
    Ok((model, diag))
}

/// Least squares subject to both consistency equalities. The last two
/// coefficients are eliminated:
/// `a_{p−1} = Σ_{j≤p−2} (j−p) a_j − λδt/2` and `a_p = λδt − Σ_{j≤p−1} a_j`.
pub fn constrained_yule_walker_fit<T: Real>(
    series: &TimeSeries<T>,
    p: usize,
    lambda: C<T>,
) -> Result<(ArModel<T>, FitDiagnostics)> {
    check_length(series, p)?;
    if p < 3 {
        return Err(Error::ConstraintDegeneracy);
    }
    let ldt = lambda * series.dt();
    let zero = C::new(T::zero(), T::zero());
    let nfree = p - 2;
    // a = B b + c with b the free coefficients a_1..a_{p-2}
    let mut bmat = CMatrix::zeros(p, nfree);
    let mut c = vec![zero; p];
    for j in 0..nfree {
        bmat[(j, j)] = C::new(T::one(), T::zero());
        let w = T::lit(j as f64 + 1.0 - p as f64);
        bmat[(p - 2, j)] = C::new(w, T::zero());
        // a_p = ldt - sum_{i<p-1} a_i - a_{p-1}
        bmat[(p - 1, j)] = C::new(-T::one() - w, T::zero());
    }
    c[p - 2] = ldt * T::lit(-0.5);
    c[p - 1] = ldt - c[p - 2];

    let mean = series.mean();
    let d: Vec<C<T>> = series.values().iter().map(|u| u - mean).collect();
    let (x, y) = design(&d, p);
    let xc = x.mul_vec(&c);
    let target: Vec<C<T>> = y.iter().zip(&d[p - 1..]).zip(&xc).map(|((v, last), k)| v - last - k).collect();
    let xb = x.mul(&bmat);
    let sol = lstsq(&xb, &target).map_err(|e| match e {
        Error::DegenerateDesign => Error::ConstraintDegeneracy,
        other => other,
    })?;
    let a: Vec<C<T>> = bmat.mul_vec(&sol.solution).iter().zip(&c).map(|(u, v)| u + v).collect();
    let m = series.len();
    let q_hat = residual_sqr(&x, &y, &a) / T::lit((m - p) as f64);
    let model = ArModel::new(a, q_hat, series.dt())?
        .with_mean_offset(mean)
        .with_provenance(Provenance::ConstrainedYuleWalker);
    let diag = FitDiagnostics {
        residual_variance: q_hat.as_f64(),
        aic_value: aic_criterion(q_hat.as_f64(), m, p),
        constrained: true,
        condition_estimate: sol.condition_estimate.as_f64(),
    };
    Ok((model, diag))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AicSelection {
    pub chosen: usize,
    /// `(p, F(p))`, with `None` where the fit failed.
    pub table: Vec<(usize, Option<f64>)>,
}

/// Fit orders `1..=p_max` in parallel and pick the minimizer of `F(p)`.
pub fn aic_select<T: Real>(series: &TimeSeries<T>, p_max: usize) -> Result<AicSelection> {
    if p_max == 0 {
        return Err(Error::InvalidArgument("p_max must be at least 1".into()));
    }
    if 4 * p_max >= series.len() {
        return Err(Error::InvalidArgument(format!(
            "p_max too large: {p_max} needs more than {} samples, have {}",
            4 * p_max,
            series.len()
        )));
    }
    let table: Vec<(usize, Option<f64>)> =
        (1..=p_max).into_par_iter().map(|p| (p, yule_walker_fit(series, p).ok().map(|(_, d)| d.aic_value))).collect();
    let chosen = table
        .iter()
        .filter_map(|(p, f)| f.map(|v| (*p, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(p, _)| p)
        .ok_or(Error::DegenerateDesign)?;
    Ok(AicSelection { chosen, table })
}
