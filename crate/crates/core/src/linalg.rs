//! Small dense complex linear algebra: matrices, Householder least squares,
//! Hermitian eigenvalues and polynomial roots.

use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::num::{Real, C};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn diagonal(d: &[C<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    m.data[i * o.cols + j] = m.data[i * o.cols + j] + a * o[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| *a * *b).fold(C::zero(), |s, x| s + x)).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "dimension mismatch");
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "dimension mismatch");
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect() }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| *a * s).collect() }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        assert_eq!(self.rows, self.cols, "square matrix");
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// `(A + Aᴴ)/2`.
    pub fn hermitian_part(&self) -> Self {
        let h = self.add(&self.adjoint());
        h.scale(C::new(T::lit(0.5), T::zero()))
    }

    /// Largest entry of `|A − Aᴴ|`.
    pub fn hermitian_defect(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        assert_eq!(self.rows, self.cols, "square matrix");
        let n = self.rows;
        // real symmetric embedding [[A, -B], [B, A]] doubles every eigenvalue
        let h = self.hermitian_part();
        let mut s = vec![vec![T::zero(); 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                let z = h[(i, j)];
                s[i][j] = z.re;
                s[i + n][j + n] = z.re;
                s[i][j + n] = -z.im;
                s[i + n][j] = z.im;
            }
        }
        let mut ev = symmetric_eigenvalues(s);
        ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        ev.into_iter().step_by(2).collect()
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Cyclic Jacobi sweeps on a real symmetric matrix.
pub fn symmetric_eigenvalues<T: Real>(mut a: Vec<Vec<T>>) -> Vec<T> {
    let n = a.len();
    let eps = T::epsilon();
    for _ in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let diag: T = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= eps * eps * (diag + off) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Least-squares solution of `A x ≈ b`.
#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub solution: Vec<C<T>>,
    pub residual_norm_sqr: T,
    /// Ratio of the largest to the smallest diagonal entry of `R`.
    pub condition_estimate: T,
}

/// Householder QR least squares. Fails when `A` is numerically rank
/// deficient.
pub fn lstsq<T: Real>(a: &CMatrix<T>, b: &[C<T>]) -> Result<LeastSquares<T>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(m, b.len(), "dimension mismatch");
    if m < n || n == 0 {
        return Err(Error::DegenerateDesign);
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    let scale = r.frobenius_norm();
    if scale == T::zero() || !scale.is_finite() {
        return Err(Error::DegenerateDesign);
    }
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm <= T::epsilon() * scale * T::lit(10.0) {
            return Err(Error::DegenerateDesign);
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == T::zero() { C::one() } else { x0 / C::new(x0.norm(), T::zero()) };
        let alpha = -phase * C::new(norm, T::zero());
        // v = x - alpha e1, normalized
        let mut v: Vec<C<T>> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vn == T::zero() {
            continue;
        }
        for z in &mut v {
            *z = *z / C::new(vn, T::zero());
        }
        let two = C::new(T::lit(2.0), T::zero());
        for j in k..n {
            let d = v.iter().enumerate().map(|(i, vi)| vi.conj() * r[(k + i, j)]).fold(C::zero(), |s, x| s + x);
            for (i, vi) in v.iter().enumerate() {
                r[(k + i, j)] = r[(k + i, j)] - two * *vi * d;
            }
        }
        let d = v.iter().enumerate().map(|(i, vi)| vi.conj() * y[k + i]).fold(C::zero(), |s, x| s + x);
        for (i, vi) in v.iter().enumerate() {
            y[k + i] = y[k + i] - two * *vi * d;
        }
    }
    let mut x = vec![C::zero(); n];
    for k in (0..n).rev() {
        let mut s = y[k];
        for j in k + 1..n {
            s = s - r[(k, j)] * x[j];
        }
        x[k] = s / r[(k, k)];
    }
    let diag: Vec<T> = (0..n).map(|k| r[(k, k)].norm()).collect();
    let dmax = diag.iter().copied().fold(T::zero(), T::max);
    let dmin = diag.iter().copied().fold(T::infinity(), T::min);
    let residual_norm_sqr = y[n..].iter().map(|z| z.norm_sqr()).sum();
    Ok(LeastSquares { solution: x, residual_norm_sqr, condition_estimate: dmax / dmin })
}

/// Roots of `Σ c_k x^k` (coefficients ascending, leading one nonzero) by
/// Aberth–Ehrlich iteration followed by Newton polishing.
pub fn poly_roots<T: Real>(coeffs: &[C<T>]) -> Vec<C<T>> {
    let mut c: Vec<C<T>> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.is_zero()) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let c: Vec<C<T>> = c.iter().map(|z| *z / lead).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    // roots at zero split off exactly
    let zeros = c.iter().take_while(|z| z.is_zero()).count();
    if zeros > 0 {
        let mut rest = poly_roots(&c[zeros..]);
        rest.extend(std::iter::repeat_n(C::zero(), zeros));
        return rest;
    }
    let eval = |x: C<T>| -> (C<T>, C<T>) {
        let mut p = C::zero();
        let mut dp = C::zero();
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + *a;
        }
        (p, dp)
    };
    // Fujiwara-style radius for the starting circle
    let radius = (0..n)
        .map(|k| c[k].norm().powf(T::one() / T::lit((n - k) as f64)))
        .fold(T::zero(), T::max)
        * T::lit(2.0);
    let radius = if radius > T::zero() { radius } else { T::one() };
    let mut z: Vec<C<T>> = (0..n)
        .map(|k| {
            let ang = T::lit(2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4);
            C::from_polar(radius, ang)
        })
        .collect();
    let tol = T::epsilon() * T::lit(4.0);
    for _ in 0..500 {
        let mut moved = T::zero();
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio: C<T> = p / dp;
            let sum = (0..n).filter(|&j| j != i).fold(C::<T>::zero(), |s, j| s + C::<T>::one() / (z[i] - z[j]));
            let w: C<T> = ratio / (C::<T>::one() - ratio * sum);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[i] = z[i] - w;
            moved = moved.max(w.norm() / (T::one() + z[i].norm()));
        }
        if moved < tol {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.is_zero() {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > T::lit(1e-3) * (T::one() + zi.norm()) {
                break;
            }
            *zi = *zi - step;
        }
    }
    z
}
