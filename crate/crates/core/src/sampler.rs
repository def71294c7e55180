//! Marginal sampling oracle and the scalar-sample ledger.
//!
//! A request for `n` samples of `X_S` costs `|S| · n` scalars. The ledger only
//! counts; callers decide whether a request fits the budget before making it.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::graph::DegreeStats;
use crate::linalg::Matrix;
use crate::model::GaussianModel;
use crate::rng::StageRng;
use crate::scalar::Scalar;

/// `n` joint draws of `X_S`; column `c` holds vertex `support[c]`.
#[derive(Clone, Debug)]
pub struct SampleBatch<T> {
    support: Vec<usize>,
    data: Matrix<T>,
}

impl<T: Scalar> SampleBatch<T> {
    pub fn new(support: Vec<usize>, data: Matrix<T>) -> Result<Self> {
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return invalid("support must be strictly increasing");
        }
        if data.ncols() != support.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns for a support of size {}",
                data.ncols(),
                support.len()
            )));
        }
        Ok(Self { support, data })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn data(&self) -> &Matrix<T> {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    /// The same draws restricted to `sub` (a subset of the support).
    pub fn project(&self, sub: &[usize]) -> Result<Self> {
        let cols = sub
            .iter()
            .map(|v| {
                self.support
                    .binary_search(v)
                    .map_err(|_| Error::InvalidArgument(format!("vertex {v} not in batch support")))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<usize> = (0..self.n()).collect();
        Self::new(sub.to_vec(), self.data.select(&rows, &cols))
    }
}

/// Anything that can hand out joint samples of a vertex subset.
pub trait SamplingOracle<T: Scalar> {
    fn p(&self) -> usize;

    /// `n` i.i.d. draws of `X_support`; `support` must be sorted and nonempty.
    fn draw(&self, support: &[usize], n: usize, rng: &mut StageRng) -> Result<SampleBatch<T>>;
}

impl<T: Scalar> SamplingOracle<T> for GaussianModel<T> {
    fn p(&self) -> usize {
        self.graph().p()
    }

    fn draw(&self, support: &[usize], n: usize, rng: &mut StageRng) -> Result<SampleBatch<T>> {
        draw(self, support, n, rng)
    }
}

/// `n` draws from `N(0, Σ_SS)` through the Cholesky factor of `Σ_SS`.
pub fn draw<T: Scalar>(model: &GaussianModel<T>, support: &[usize], n: usize, rng: &mut StageRng) -> Result<SampleBatch<T>> {
    if support.is_empty() {
        return invalid("cannot sample an empty vertex set");
    }
    let p = model.graph().p();
    if let Some(&v) = support.iter().find(|&&v| v >= p) {
        return invalid(format!("vertex {v} out of range for p = {p}"));
    }
    let sigma = model.covariance().principal(support);
    let l = sigma.cholesky().map_err(|_| Error::NotPositiveDefinite {
        context: "covariance submatrix of the sampling model".into(),
    })?;
    let q = support.len();
    let factor = l.factor();
    let mut data = Matrix::zeros(n, q);
    let mut z = vec![T::zero(); q];
    for r in 0..n {
        for zk in z.iter_mut() {
            *zk = T::lit(rng.sample::<f64, _>(StandardNormal));
        }
        let out = data.row_mut(r);
        for a in 0..q {
            let lrow = factor.row(a);
            out[a] = (0..=a).fold(T::zero(), |s, b| s + lrow[b] * z[b]);
        }
    }
    SampleBatch::new(support.to_vec(), data)
}

/// One `(S, n)` request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub support: Vec<usize>,
    pub n: usize,
}

impl LedgerEntry {
    pub fn cost(&self) -> u64 {
        self.support.len() as u64 * self.n as u64
    }
}

/// Ordered record of sampling requests with a running scalar total.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SamplingLedger {
    entries: Vec<LedgerEntry>,
    scalar_total: u64,
    budget: Option<u64>,
}

impl SamplingLedger {
    pub fn new(budget: Option<u64>) -> Self {
        Self {
            entries: Vec::new(),
            scalar_total: 0,
            budget,
        }
    }

    pub fn unlimited() -> Self {
        Self::new(None)
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn scalar_total(&self) -> u64 {
        self.scalar_total
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn record(&mut self, support: &[usize], n: usize) {
        let entry = LedgerEntry {
            support: support.to_vec(),
            n,
        };
        self.scalar_total += entry.cost();
        self.entries.push(entry);
        debug_assert!(self.audit());
    }

    /// Whether the running total matches a recomputation from the entries.
    pub fn audit(&self) -> bool {
        self.entries.iter().map(LedgerEntry::cost).sum::<u64>() == self.scalar_total
    }

    /// Whether spending `cost` more scalars would pass the budget.
    pub fn would_exceed(&self, cost: u64) -> bool {
        self.budget
            .is_some_and(|b| self.scalar_total.saturating_add(cost) > b)
    }
}

/// `Σ_i Σ_{k=0}^{⌈log2 d^i_max⌉} (g(2^k) + h(2^k))`, with vertices whose local
/// maximum degree is 0 or 1 contributing only the `k = 0` term.
pub fn sufficient_budget(stats: &DegreeStats, g: impl Fn(usize) -> u64, h: impl Fn(usize) -> u64) -> u64 {
    stats
        .local_max
        .iter()
        .map(|&d| {
            let top = ceil_log2(d);
            (0..=top).map(|k| g(1 << k) + h(1 << k)).sum::<u64>()
        })
        .sum()
}

/// `⌈log2 d⌉`, taken as 0 for `d ≤ 1`.
pub fn ceil_log2(d: usize) -> u32 {
    if d <= 1 {
        0
    } else {
        usize::BITS - (d - 1).leading_zeros()
    }
}

/// One row of a run trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub stage: usize,
    pub ell: usize,
    /// Number of unsettled vertices sampled in this stage.
    pub subset_size: usize,
    pub n_select: usize,
    pub n_verify: usize,
    /// Running scalar total after the stage.
    pub scalar_total: u64,
    pub newly_found: Vec<usize>,
    pub newly_settled: Vec<usize>,
}
