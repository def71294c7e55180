//! Zero-mean Gaussian models whose precision matrix is supported on a graph,
//! population partial correlations, and small-scale diagnostics of the
//! conditions the recovery guarantees rely on.

use std::fmt::Write as _;

use crate::combinatorics::{binomial, Combinations};
use crate::error::{invalid, Error, Result};
use crate::estimators::partial_corr_by_inversion;
use crate::graph::{degree_stats, Graph};
use crate::linalg::{Cholesky, Matrix};
use crate::scalar::Scalar;

/// Smallest admissible eigenvalue of a constructed precision matrix.
pub const MIN_PRECISION_EIGENVALUE: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct GaussianModel<T> {
    graph: Graph,
    precision: Matrix<T>,
    covariance: Matrix<T>,
    cov_chol: Cholesky<T>,
}

impl<T: Scalar> GaussianModel<T> {
    /// Checks that `precision` is symmetric positive definite and that its
    /// off-diagonal support is exactly the edge set of `graph`.
    pub fn from_precision(graph: Graph, precision: Matrix<T>) -> Result<Self> {
        let p = graph.p();
        if precision.nrows() != p || !precision.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} precision for p = {p}",
                precision.nrows(),
                precision.ncols()
            )));
        }
        if !precision.is_symmetric(T::zero()) {
            return invalid("precision matrix is not symmetric");
        }
        for i in 0..p {
            for j in (i + 1)..p {
                if (precision[(i, j)] != T::zero()) != graph.has_edge(i, j) {
                    return invalid(format!("precision support disagrees with the graph at ({i}, {j})"));
                }
            }
        }
        let covariance = precision
            .cholesky()
            .map_err(|_| Error::NotPositiveDefinite {
                context: "precision matrix".into(),
            })?
            .inverse();
        let cov_chol = covariance.cholesky()?;
        Ok(Self {
            graph,
            precision,
            covariance,
            cov_chol,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn p(&self) -> usize {
        self.graph.p()
    }

    pub fn precision(&self) -> &Matrix<T> {
        &self.precision
    }

    pub fn covariance(&self) -> &Matrix<T> {
        &self.covariance
    }

    /// Lower Cholesky factor of the covariance.
    pub fn cov_cholesky(&self) -> &Cholesky<T> {
        &self.cov_chol
    }

    /// `max |K Σ - I|`.
    pub fn inverse_residual(&self) -> T {
        let prod = self.precision.matmul(&self.covariance).expect("square matrices of equal size");
        prod.max_abs_diff(&Matrix::identity(self.p()))
    }

    /// Text form: the graph's edge list, a `precision` line, then the `p`
    /// rows of `K`.
    pub fn to_text(&self) -> String {
        let mut out = self.graph.to_edge_list();
        out.push_str("precision\n");
        for r in 0..self.p() {
            let row: Vec<String> = self.precision.row(r).iter().map(|v| v.as_f64().to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut head = String::new();
        let mut marker = None;
        for (n, l) in lines.by_ref() {
            if l.trim() == "precision" {
                marker = Some(n + 1);
                break;
            }
            head.push_str(l);
            head.push('\n');
        }
        let Some(marker_line) = marker else {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: "missing `precision` section".into(),
            });
        };
        let graph = Graph::parse_edge_list(&head)?;
        let p = graph.p();
        let mut values = Vec::with_capacity(p * p);
        let mut rows = 0;
        for (n, l) in lines {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let row = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map(T::lit).map_err(|e| Error::Parse {
                        line: n + 1,
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            if row.len() != p {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("expected {p} entries, got {}", row.len()),
                });
            }
            values.extend(row);
            rows += 1;
        }
        if rows != p {
            return Err(Error::Parse {
                line: marker_line,
                message: format!("expected {p} precision rows, got {rows}"),
            });
        }
        Self::from_precision(graph, Matrix::from_vec(p, p, values)?)
    }
}

/// `0.3 / sqrt(d_max)`, or 0.3 on an edgeless graph.
pub fn default_edge_weight(g: &Graph) -> f64 {
    let d = degree_stats(g).d_max;
    0.3 / (d.max(1) as f64).sqrt()
}

/// `K = (1 + diag_boost) I + edge_weight · A`, with the off-diagonal part
/// shrunk if needed so that the smallest eigenvalue of `K` exceeds 0.05.
pub fn precision_from_graph<T: Scalar>(g: &Graph, edge_weight: T, diag_boost: T) -> Result<GaussianModel<T>> {
    if edge_weight == T::zero() || !edge_weight.is_finite() {
        return invalid("edge weight must be finite and nonzero");
    }
    precision_from_weights(g, diag_boost, |_, _| edge_weight)
}

/// Like [`precision_from_graph`] with a per-edge weight `weight(i, j)`,
/// called once per edge with `i < j`.
///
/// With `W` the weighted adjacency and `b` the boost, if
/// `λ_min((1 + b) I + W) ≤ 0.05` then `W` is scaled by
/// `0.95 ((1 + b) - 0.05) / |λ_min(W)|`, which puts `λ_min(K)` above 0.05.
pub fn precision_from_weights<T: Scalar>(
    g: &Graph,
    diag_boost: T,
    mut weight: impl FnMut(usize, usize) -> T,
) -> Result<GaussianModel<T>> {
    if !(diag_boost >= T::zero()) || !diag_boost.is_finite() {
        return invalid("diag_boost must be finite and nonnegative");
    }
    let p = g.p();
    let mut w = Matrix::zeros(p, p);
    for (i, j) in g.edges() {
        let v = weight(i, j);
        if v == T::zero() || !v.is_finite() {
            return invalid(format!("edge ({i}, {j}) has weight {v}"));
        }
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    let diag = T::one() + diag_boost;
    let floor = T::lit(MIN_PRECISION_EIGENVALUE);
    let w_min = w.symmetric_eigenvalues()?.first().copied().unwrap_or(T::zero());
    if diag + w_min <= floor {
        let scale = T::lit(0.95) * (diag - floor) / w_min.abs();
        for v in w.as_mut_slice() {
            *v = *v * scale;
        }
    }
    let mut k = w;
    for i in 0..p {
        k[(i, i)] = diag;
    }
    GaussianModel::from_precision(g.clone(), k).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => Error::NotPositiveDefinite {
            context: "precision matrix after shrinkage".into(),
        },
        other => other,
    })
}

fn check_triple(p: usize, i: usize, j: usize, s: &[usize]) -> Result<()> {
    if i >= p || j >= p || s.iter().any(|&k| k >= p) {
        return invalid("vertex index out of range");
    }
    if i == j {
        return invalid("partial correlation of a vertex with itself");
    }
    if s.contains(&i) || s.contains(&j) {
        return invalid("conditioning set must exclude i and j");
    }
    Ok(())
}

/// `ρ_{i,j|S}` from the inverse of the `{i, j} ∪ S` block of `sigma`.
pub fn population_partial_correlation<T: Scalar>(sigma: &Matrix<T>, i: usize, j: usize, s: &[usize]) -> Result<T> {
    check_triple(sigma.nrows(), i, j, s)?;
    partial_corr_by_inversion(sigma, i, j, s)
}

/// Coefficients of the best linear predictor of `X_i` from `X_G`,
/// `G = F \ {i}` in the order of `f`: `Σ_GG^{-1} Σ_Gi`.
pub fn population_regression<T: Scalar>(sigma: &Matrix<T>, i: usize, f: &[usize]) -> Result<(Vec<usize>, Vec<T>)> {
    let g: Vec<usize> = f.iter().copied().filter(|&v| v != i).collect();
    if g.is_empty() {
        return Ok((g, Vec::new()));
    }
    let rhs: Vec<T> = g.iter().map(|&v| sigma[(v, i)]).collect();
    let beta = sigma.principal(&g).cholesky()?.solve(&rhs);
    Ok((g, beta))
}

/// Precision matrix of `X_F` alone: `K_FF - K_{F,F^c} K_{F^c,F^c}^{-1} K_{F^c,F}`.
pub fn marginal_precision<T: Scalar>(k: &Matrix<T>, f: &[usize]) -> Result<Matrix<T>> {
    let p = k.nrows();
    let rest: Vec<usize> = (0..p).filter(|v| !f.contains(v)).collect();
    let mut out = k.principal(f);
    if rest.is_empty() {
        return Ok(out);
    }
    let chol = k.principal(&rest).cholesky()?;
    let cross = k.select(&rest, f);
    // columns of L^{-1} K_{F^c,F}
    let whitened: Vec<Vec<T>> = (0..f.len()).map(|c| chol.forward(&cross.column(c))).collect();
    for a in 0..f.len() {
        for b in 0..f.len() {
            let d = whitened[a]
                .iter()
                .zip(&whitened[b])
                .fold(T::zero(), |s, (&x, &y)| s + x * y);
            out[(a, b)] = out[(a, b)] - d;
        }
    }
    Ok(out)
}

/// Population diagnostics over all `(i, j, S)` with `|S| ≤ search_depth`.
#[derive(Clone, Debug)]
pub struct AssumptionReport<T> {
    /// Smallest `|ρ_{i,j|S}|` over triples where `S` does not separate `i`
    /// and `j`; `None` if there were none.
    pub m_hat: Option<T>,
    /// Largest `|ρ_{i,j|S}|` over every triple searched.
    pub big_m_hat: T,
    /// Extreme eigenvalues of `Σ_{N(i),N(i)}` over vertices with neighbors.
    pub cmin_hat: Option<T>,
    pub cmax_hat: Option<T>,
    /// `1 - max_i ‖Σ_{R,N} Σ_{N,N}^{-1}‖_∞` with `N = N(i)` and `R` the
    /// remaining vertices other than `i`. Negative values mean the
    /// incoherence condition fails.
    pub gamma_hat: Option<T>,
    pub search_depth: usize,
    pub triples: u128,
    /// Non-separated triples whose partial correlation is numerically zero.
    pub faithfulness_violations: usize,
    /// Separated triples whose partial correlation is not numerically zero.
    pub markov_violations: usize,
}

impl<T: Scalar> AssumptionReport<T> {
    /// Whether the incoherence margin lies in `(0, 1]`.
    pub fn incoherence_holds(&self) -> bool {
        self.gamma_hat.is_none_or(|g| g > T::zero() && g <= T::one())
    }
}

pub const DEFAULT_SCAN_CAP: u128 = 10_000_000;

/// Tolerance below which a population partial correlation counts as zero.
pub const ZERO_TOL: f64 = 1e-10;

pub fn assumption_scan<T: Scalar>(model: &GaussianModel<T>, max_cond_size: usize, cap: u128) -> Result<AssumptionReport<T>> {
    let p = model.p();
    if p < 2 {
        return invalid("scan needs at least two vertices");
    }
    if max_cond_size > p - 2 {
        return invalid(format!("conditioning size {max_cond_size} exceeds p - 2 = {}", p - 2));
    }
    let pairs = binomial(p, 2);
    let triples = (0..=max_cond_size)
        .map(|k| binomial(p - 2, k))
        .fold(0u128, |acc, c| acc.saturating_add(c))
        .saturating_mul(pairs);
    if triples > cap {
        return Err(Error::EnumerationCap { subsets: triples, cap });
    }
    let sigma = model.covariance();
    let g = model.graph();
    let zero = T::lit(ZERO_TOL);
    let mut m_hat: Option<T> = None;
    let mut big_m = T::zero();
    let mut faith = 0;
    let mut markov = 0;
    for i in 0..p {
        for j in (i + 1)..p {
            let others: Vec<usize> = (0..p).filter(|&v| v != i && v != j).collect();
            for k in 0..=max_cond_size {
                let mut combos = Combinations::new(&others, k);
                while let Some(s) = combos.next_subset() {
                    let r = partial_corr_by_inversion(sigma, i, j, s)?.abs();
                    big_m = big_m.max(r);
                    if g.separates(i, j, s) {
                        if r > zero {
                            markov += 1;
                        }
                    } else {
                        m_hat = Some(m_hat.map_or(r, |m| m.min(r)));
                        if r <= zero {
                            faith += 1;
                        }
                    }
                }
            }
        }
    }
    let mut cmin: Option<T> = None;
    let mut cmax: Option<T> = None;
    let mut worst_incoherence: Option<T> = None;
    for i in 0..p {
        let nb: Vec<usize> = g.neighbors(i).iter().copied().collect();
        if nb.is_empty() {
            continue;
        }
        let block = sigma.principal(&nb);
        let eig = block.symmetric_eigenvalues()?;
        let (lo, hi) = (eig[0], eig[eig.len() - 1]);
        cmin = Some(cmin.map_or(lo, |c| c.min(lo)));
        cmax = Some(cmax.map_or(hi, |c| c.max(hi)));
        let rest: Vec<usize> = (0..p).filter(|v| *v != i && !nb.contains(v)).collect();
        if rest.is_empty() {
            continue;
        }
        let chol = block.cholesky()?;
        // row r of Σ_{R,N} Σ_{N,N}^{-1} solves Σ_NN x = Σ_{N,r}
        let norm = rest
            .iter()
            .map(|&r| {
                let col: Vec<T> = nb.iter().map(|&v| sigma[(v, r)]).collect();
                chol.solve(&col).iter().fold(T::zero(), |s, x| s + x.abs())
            })
            .fold(T::zero(), T::max);
        worst_incoherence = Some(worst_incoherence.map_or(norm, |w| w.max(norm)));
    }
    Ok(AssumptionReport {
        m_hat,
        big_m_hat: big_m,
        cmin_hat: cmin,
        cmax_hat: cmax,
        gamma_hat: worst_incoherence.map(|w| T::one() - w),
        search_depth: max_cond_size,
        triples,
        faithfulness_violations: faith,
        markov_violations: markov,
    })
}
