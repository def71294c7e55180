//! Statistical kernels: empirical second moments, empirical partial
//! correlations, and an l1-penalized least-squares solver.
//!
//! The model is zero-mean, so the empirical covariance is the raw second
//! moment `(1/n) Σ_r x_r x_rᵀ` with no centering. Feed centered data only if
//! that is what you mean.

use std::collections::HashMap;

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::sampler::SampleBatch;
use crate::scalar::Scalar;

/// Empirical covariance over a sorted vertex support.
#[derive(Clone, Debug)]
pub struct EmpiricalCov<T> {
    support: Vec<usize>,
    n: usize,
    matrix: Matrix<T>,
}

impl<T: Scalar> EmpiricalCov<T> {
    pub fn from_batch(batch: &SampleBatch<T>) -> Self {
        let data = batch.data();
        let q = data.ncols();
        let n = data.nrows();
        let mut m = Matrix::zeros(q, q);
        for r in 0..n {
            let row = data.row(r);
            for a in 0..q {
                let xa = row[a];
                if xa == T::zero() {
                    continue;
                }
                let out = m.row_mut(a);
                for b in a..q {
                    out[b] = out[b] + xa * row[b];
                }
            }
        }
        if n > 0 {
            let inv_n = T::one() / T::from_count(n);
            for a in 0..q {
                for b in a..q {
                    let v = m[(a, b)] * inv_n;
                    m[(a, b)] = v;
                    m[(b, a)] = v;
                }
            }
        }
        Self {
            support: batch.support().to_vec(),
            n,
            matrix: m,
        }
    }

    /// Wraps a ready-made covariance matrix indexed by `support` (sorted,
    /// distinct), treating it as if estimated from `n` samples.
    pub fn from_matrix(support: Vec<usize>, n: usize, matrix: Matrix<T>) -> Result<Self> {
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return invalid("support must be strictly increasing");
        }
        if matrix.nrows() != support.len() || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} covariance for a support of size {}",
                matrix.nrows(),
                matrix.ncols(),
                support.len()
            )));
        }
        Ok(Self { support, n, matrix })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    /// Position of vertex `v` within the support.
    pub fn local(&self, v: usize) -> Option<usize> {
        self.support.binary_search(&v).ok()
    }

    fn locals(&self, vs: &[usize]) -> Result<Vec<usize>> {
        vs.iter()
            .map(|&v| {
                self.local(v)
                    .ok_or_else(|| Error::InvalidArgument(format!("vertex {v} not in sample support")))
            })
            .collect()
    }

    fn check_triple(&self, i: usize, j: usize, s: &[usize]) -> Result<(usize, usize, Vec<usize>)> {
        if i == j {
            return invalid(format!("partial correlation of vertex {i} with itself"));
        }
        if s.contains(&i) || s.contains(&j) {
            return invalid("conditioning set must exclude i and j");
        }
        if self.n <= s.len() + 2 {
            return Err(Error::InsufficientSamples {
                n: self.n,
                needed: s.len() + 2,
            });
        }
        let li = self.locals(&[i])?[0];
        let lj = self.locals(&[j])?[0];
        Ok((li, lj, self.locals(s)?))
    }
}

fn clamp_unit<T: Scalar>(x: T) -> T {
    x.max(-T::one()).min(T::one())
}

/// `-Θ_ab / sqrt(Θ_aa Θ_bb)` with `Θ` the inverse of the `{a, b} ∪ s` block of
/// `m` (all local indices). Unclamped.
pub fn partial_corr_by_inversion<T: Scalar>(m: &Matrix<T>, a: usize, b: usize, s: &[usize]) -> Result<T> {
    let mut idx = Vec::with_capacity(s.len() + 2);
    idx.push(a);
    idx.push(b);
    idx.extend_from_slice(s);
    let theta = m.principal(&idx).spd_inverse()?;
    Ok(-theta[(0, 1)] / (theta[(0, 0)] * theta[(1, 1)]).sqrt())
}

/// Empirical `ρ̂_{i,j|S}` by inverting the `{i, j} ∪ S` block of the empirical
/// covariance, clamped to `[-1, 1]`.
pub fn empirical_partial_corr_inv<T: Scalar>(cov: &EmpiricalCov<T>, i: usize, j: usize, s: &[usize]) -> Result<T> {
    let (li, lj, ls) = cov.check_triple(i, j, s)?;
    match partial_corr_by_inversion(&cov.matrix, li, lj, &ls) {
        Ok(r) => Ok(clamp_unit(r)),
        Err(Error::NotPositiveDefinite { .. }) => Err(Error::InsufficientSamples {
            n: cov.n,
            needed: s.len() + 2,
        }),
        Err(e) => Err(e),
    }
}

const DEGENERATE: f64 = 1.0 - 1e-12;

/// Empirical `ρ̂_{i,j|S}` by the one-element-at-a-time elimination recursion
/// over plain correlations, removing the last element of `S` first.
/// Intermediate values are memoized, so the cost is polynomial in `|S|`.
pub fn empirical_partial_corr_rec<T: Scalar>(cov: &EmpiricalCov<T>, i: usize, j: usize, s: &[usize]) -> Result<T> {
    let (li, lj, ls) = cov.check_triple(i, j, s)?;
    let mut memo = HashMap::new();
    recursion(&cov.matrix, li, lj, &ls, &mut memo)
}

fn recursion<T: Scalar>(
    m: &Matrix<T>,
    a: usize,
    b: usize,
    s: &[usize],
    memo: &mut HashMap<(usize, usize, usize), T>,
) -> Result<T> {
    let key = (a.min(b), a.max(b), s.len());
    if let Some(&v) = memo.get(&key) {
        return Ok(v);
    }
    let value = match s.split_last() {
        None => {
            let d = (m[(a, a)] * m[(b, b)]).sqrt();
            if !(d > T::zero()) {
                return Err(Error::DegenerateCorrelation { value: f64::NAN });
            }
            clamp_unit(m[(a, b)] / d)
        }
        Some((&k, rest)) => {
            let r_ab = recursion(m, a, b, rest, memo)?;
            let r_ak = recursion(m, a, k, rest, memo)?;
            let r_bk = recursion(m, b, k, rest, memo)?;
            for r in [r_ak, r_bk] {
                if r.abs() >= T::lit(DEGENERATE) {
                    return Err(Error::DegenerateCorrelation { value: r.as_f64() });
                }
            }
            let den = ((T::one() - r_ak * r_ak) * (T::one() - r_bk * r_bk)).sqrt();
            clamp_unit((r_ab - r_ak * r_bk) / den)
        }
    };
    memo.insert(key, value);
    Ok(value)
}

/// `ρ̂_{i,j|S}` for every `j` in `targets` at once, via the conditional
/// covariance `C_{AA} - C_{AS} C_{SS}^{-1} C_{SA}`. Algebraically the same
/// quantity as [`empirical_partial_corr_inv`], clamped the same way.
pub fn partial_corrs_given<T: Scalar>(
    cov: &EmpiricalCov<T>,
    i: usize,
    s: &[usize],
    targets: &[usize],
) -> Result<Vec<T>> {
    if cov.n <= s.len() + 2 {
        return Err(Error::InsufficientSamples {
            n: cov.n,
            needed: s.len() + 2,
        });
    }
    let li = cov.locals(&[i])?[0];
    let ls = cov.locals(s)?;
    let lt = cov.locals(targets)?;
    let m = &cov.matrix;
    let insufficient = || Error::InsufficientSamples {
        n: cov.n,
        needed: s.len() + 2,
    };
    let chol = if ls.is_empty() {
        None
    } else {
        Some(m.principal(&ls).cholesky().map_err(|_| insufficient())?)
    };
    let whiten = |a: usize| -> Vec<T> {
        match &chol {
            None => Vec::new(),
            Some(c) => c.forward(&ls.iter().map(|&k| m[(k, a)]).collect::<Vec<_>>()),
        }
    };
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
    let ui = whiten(li);
    let var_i = m[(li, li)] - dot(&ui, &ui);
    if !(var_i > T::zero()) {
        return Err(insufficient());
    }
    lt.iter()
        .map(|&lj| {
            if lj == li || ls.contains(&lj) {
                return invalid("target overlaps the conditioning set or equals i");
            }
            let uj = whiten(lj);
            let var_j = m[(lj, lj)] - dot(&uj, &uj);
            if !(var_j > T::zero()) {
                return Err(insufficient());
            }
            let c = m[(li, lj)] - dot(&ui, &uj);
            Ok(clamp_unit(c / (var_i * var_j).sqrt()))
        })
        .collect()
}

/// Solver settings for [`lasso_cd`].
#[derive(Clone, Copy, Debug)]
pub struct LassoConfig<T> {
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for LassoConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-7),
            max_iter: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LassoSolution<T> {
    pub beta: Vec<T>,
    pub lambda: T,
    /// Coordinate-descent sweeps used.
    pub n_iter: usize,
    /// Largest violation of the stationarity conditions at return.
    pub kkt_residual: T,
}

impl<T: Scalar> LassoSolution<T> {
    pub fn support(&self) -> Vec<usize> {
        support_of(&self.beta)
    }
}

fn support_of<T: Scalar>(beta: &[T]) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, b)| **b != T::zero())
        .map(|(k, _)| k)
        .collect()
}

fn soft_threshold<T: Scalar>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

/// Cyclic coordinate descent on `½ βᵀGβ - cᵀβ + λ‖β‖₁`, i.e. the lasso
/// objective `(1/2n)‖y - Xβ‖² + λ‖β‖₁` expressed through `G = XᵀX/n` and
/// `c = Xᵀy/n`. Keeps the gradient `c - Gβ` up to date after every
/// coordinate move.
#[derive(Clone, Debug)]
pub struct CoordinateDescent<'a, T> {
    gram: &'a Matrix<T>,
    xty: &'a [T],
    lambda: T,
    beta: Vec<T>,
    grad: Vec<T>,
}

impl<'a, T: Scalar> CoordinateDescent<'a, T> {
    pub fn new(gram: &'a Matrix<T>, xty: &'a [T], lambda: T) -> Result<Self> {
        if !gram.is_square() || gram.nrows() != xty.len() {
            return Err(Error::DimensionMismatch(format!(
                "gram {}x{} with {} correlations",
                gram.nrows(),
                gram.ncols(),
                xty.len()
            )));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return invalid(format!("lambda must be finite and nonnegative, got {lambda}"));
        }
        Ok(Self {
            gram,
            xty,
            lambda,
            beta: vec![T::zero(); xty.len()],
            grad: xty.to_vec(),
        })
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    /// One pass over all coordinates; returns the largest coordinate change.
    pub fn sweep(&mut self) -> T {
        let q = self.beta.len();
        let mut max_delta = T::zero();
        for j in 0..q {
            let gjj = self.gram[(j, j)];
            if !(gjj > T::zero()) {
                continue;
            }
            let old = self.beta[j];
            let z = self.grad[j] + gjj * old;
            let new = soft_threshold(z, self.lambda) / gjj;
            let delta = new - old;
            if delta != T::zero() {
                self.beta[j] = new;
                let row = self.gram.row(j);
                for (g, &gk) in self.grad.iter_mut().zip(row) {
                    *g = *g - gk * delta;
                }
                max_delta = max_delta.max(delta.abs());
            }
        }
        max_delta
    }

    pub fn kkt_residual(&self) -> T {
        self.beta
            .iter()
            .zip(&self.grad)
            .fold(T::zero(), |worst, (&b, &g)| {
                let v = if b != T::zero() {
                    (g - self.lambda * b.signum()).abs()
                } else {
                    (g.abs() - self.lambda).max(T::zero())
                };
                worst.max(v)
            })
    }

    /// Objective value given `yᵀy / n`.
    pub fn objective(&self, yty_over_n: T) -> T {
        let half = T::lit(0.5);
        let (cb, gb, l1) = self
            .beta
            .iter()
            .zip(self.xty.iter().zip(&self.grad))
            .fold((T::zero(), T::zero(), T::zero()), |(cb, gb, l1), (&b, (&c, &g))| {
                (cb + c * b, gb + g * b, l1 + b.abs())
            });
        half * yty_over_n - half * cb - half * gb + self.lambda * l1
    }

    pub fn solve(mut self, tol: T, max_iter: usize) -> Result<LassoSolution<T>> {
        for it in 1..=max_iter {
            let delta = self.sweep();
            if delta < tol {
                let kkt = self.kkt_residual();
                if kkt < tol {
                    return Ok(LassoSolution {
                        beta: self.beta,
                        lambda: self.lambda,
                        n_iter: it,
                        kkt_residual: kkt,
                    });
                }
            }
        }
        Err(Error::LassoNotConverged {
            iterations: max_iter,
            kkt_residual: self.kkt_residual().as_f64(),
        })
    }
}

/// Lasso from second moments: `gram = XᵀX/n`, `xty = Xᵀy/n`.
pub fn lasso_cd_gram<T: Scalar>(gram: &Matrix<T>, xty: &[T], lambda: T, config: LassoConfig<T>) -> Result<LassoSolution<T>> {
    CoordinateDescent::new(gram, xty, lambda)?.solve(config.tol, config.max_iter)
}

/// Minimizes `(1/2n)‖y - Xβ‖² + λ‖β‖₁` by cyclic coordinate descent.
/// Converged when the largest coordinate move in a sweep and the KKT
/// residual are both below `tol`.
pub fn lasso_cd<T: Scalar>(y: &[T], x: &Matrix<T>, lambda: T, tol: T, max_iter: usize) -> Result<LassoSolution<T>> {
    let (gram, xty) = normal_moments(y, x)?;
    lasso_cd_gram(&gram, &xty, lambda, LassoConfig { tol, max_iter })
}

/// `(XᵀX/n, Xᵀy/n)`.
pub fn normal_moments<T: Scalar>(y: &[T], x: &Matrix<T>) -> Result<(Matrix<T>, Vec<T>)> {
    let (n, q) = (x.nrows(), x.ncols());
    if n == 0 || q == 0 {
        return invalid("lasso needs at least one sample and one column");
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("{} responses for {n} rows", y.len())));
    }
    let inv_n = T::one() / T::from_count(n);
    let mut gram = Matrix::zeros(q, q);
    let mut xty = vec![T::zero(); q];
    for r in 0..n {
        let row = x.row(r);
        for a in 0..q {
            xty[a] = xty[a] + row[a] * y[r];
            for b in a..q {
                gram[(a, b)] = gram[(a, b)] + row[a] * row[b];
            }
        }
    }
    for a in 0..q {
        xty[a] = xty[a] * inv_n;
        for b in a..q {
            let v = gram[(a, b)] * inv_n;
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }
    Ok((gram, xty))
}

/// `(1/2n)‖y - Xβ‖² + λ‖β‖₁` evaluated directly.
pub fn lasso_objective<T: Scalar>(y: &[T], x: &Matrix<T>, beta: &[T], lambda: T) -> T {
    let fitted = x.mat_vec(beta);
    let rss = y
        .iter()
        .zip(&fitted)
        .fold(T::zero(), |s, (&a, &b)| s + (a - b) * (a - b));
    let l1 = beta.iter().fold(T::zero(), |s, &b| s + b.abs());
    rss / (T::lit(2.0) * T::from_count(y.len())) + lambda * l1
}

/// Indices of the `k` largest `|β|` among the nonzero coordinates (all of the
/// support if it has at most `k` entries), ties to the lower index, returned
/// ascending.
pub fn top_k_support<T: Scalar>(beta: &[T], k: usize) -> Vec<usize> {
    let mut support = support_of(beta);
    if support.len() > k {
        support.sort_by(|&a, &b| {
            beta[b]
                .abs()
                .partial_cmp(&beta[a].abs())
                .expect("finite coefficients")
                .then(a.cmp(&b))
        });
        support.truncate(k);
        support.sort_unstable();
    }
    support
}
