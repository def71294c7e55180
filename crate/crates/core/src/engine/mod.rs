//! The doubling neighborhood-selection loop and its instantiations.
//!
//! Each stage at counter `ℓ` draws `g(ℓ)` select-samples and `h(ℓ)`
//! verify-samples of every unsettled vertex jointly, proposes a neighborhood
//! for each vertex whose neighborhood is not yet found, keeps the proposals
//! that verify, and settles a found vertex once all of its proposed neighbors
//! are found. Samples never outlive their stage.

mod adpact;
mod ampl;
mod oracle;
mod passive;

pub use adpact::{AdPaCT, DEFAULT_SUBSET_CAP};
pub use ampl::Ampl;
pub use oracle::TruthRule;
pub use passive::mb_passive;

use crate::error::{invalid, Error, Result};
use crate::estimators::EmpiricalCov;
use crate::graph::Graph;
use crate::rng::{select_stream, verify_stream};
use crate::sampler::{SamplingLedger, SamplingOracle, TraceRow};
use crate::scalar::Scalar;

/// Outcome of a neighborhood proposal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Candidate {
    /// No admissible neighborhood at this stage.
    NoCandidate,
    /// A proposed neighborhood, sorted. May be empty.
    Set(Vec<usize>),
}

impl Candidate {
    pub fn as_set(&self) -> Option<&[usize]> {
        match self {
            Self::NoCandidate => None,
            Self::Set(s) => Some(s),
        }
    }
}

/// Everything a rule sees during one stage.
#[derive(Clone, Debug)]
pub struct StageContext<T> {
    pub ell: usize,
    /// Unsettled vertices, sorted; the support of both sample sets.
    pub unsettled: Vec<usize>,
    pub select: Option<EmpiricalCov<T>>,
    pub verify: Option<EmpiricalCov<T>>,
}

impl<T: Scalar> StageContext<T> {
    pub fn select_cov(&self) -> Result<&EmpiricalCov<T>> {
        self.select
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("rule needs select-samples but g(ℓ) = 0".into()))
    }

    pub fn verify_cov(&self) -> Result<&EmpiricalCov<T>> {
        self.verify
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("rule needs verify-samples but h(ℓ) = 0".into()))
    }

    /// Unsettled vertices other than `i` and outside `s`.
    pub fn others(&self, i: usize, s: &[usize]) -> Vec<usize> {
        self.unsettled
            .iter()
            .copied()
            .filter(|&v| v != i && !s.contains(&v))
            .collect()
    }
}

/// A select/verify pair with its per-stage sample sizes.
pub trait NeighborhoodRule<T: Scalar> {
    /// Select-samples per stage at counter `ell`.
    fn g(&self, ell: usize) -> usize;
    /// Verify-samples per stage at counter `ell`.
    fn h(&self, ell: usize) -> usize;
    /// Proposes a neighborhood of `i` among `ctx.unsettled`.
    fn select(&self, i: usize, ctx: &StageContext<T>) -> Result<Candidate>;
    fn verify(&self, i: usize, candidate: &Candidate, ctx: &StageContext<T>) -> Result<bool>;
}

/// `⌈c · ℓ · ln p⌉`.
pub fn stage_samples(c: f64, ell: usize, p: usize) -> usize {
    (c * ell as f64 * (p as f64).ln()).ceil().max(0.0) as usize
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    /// Every vertex has a found neighborhood.
    Completed,
    /// The counter reached `2p` with some neighborhoods still missing.
    StageLimit,
    /// The next stage would have passed the budget.
    BudgetExceeded,
    /// A subroutine failed; the graph holds what was found before.
    Failed(String),
}

impl RunStatus {
    pub fn label(&self) -> String {
        match self {
            Self::Completed => "completed".into(),
            Self::StageLimit => "stage_limit".into(),
            Self::BudgetExceeded => "budget_exceeded".into(),
            Self::Failed(m) => format!("failed: {m}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RecoveredGraph {
    /// Union of the found neighborhoods: `{i, j}` is an edge when either
    /// endpoint lists the other.
    pub graph: Graph,
    pub neighborhoods: Vec<Option<Vec<usize>>>,
    /// Counter value of the stage in which each neighborhood was found.
    pub found_at: Vec<Option<usize>>,
    pub settled_at: Vec<Option<usize>>,
    pub trace: Vec<TraceRow>,
    pub ledger: SamplingLedger,
    pub status: RunStatus,
}

impl RecoveredGraph {
    pub fn scalar_total(&self) -> u64 {
        self.ledger.scalar_total()
    }

    /// Scalar samples per vertex.
    pub fn effective_samples(&self) -> f64 {
        let p = self.graph.p();
        if p == 0 {
            0.0
        } else {
            self.scalar_total() as f64 / p as f64
        }
    }
}

pub(crate) fn or_graph(p: usize, neighborhoods: &[Option<Vec<usize>>]) -> Graph {
    let mut g = Graph::empty(p);
    for (i, nb) in neighborhoods.iter().enumerate() {
        for &j in nb.iter().flatten() {
            if i != j {
                g.add_edge(i, j).expect("neighborhood entries are valid vertices");
            }
        }
    }
    g
}

/// Runs the doubling loop until every neighborhood is found, the counter
/// reaches `2p`, or the next stage would pass `budget`. Stage `k` draws its
/// select-samples from stream `2k` and its verify-samples from stream
/// `2k + 1` of `seed`.
pub fn run_meta<T: Scalar, O: SamplingOracle<T>, R: NeighborhoodRule<T>>(
    oracle: &O,
    rule: &R,
    budget: Option<u64>,
    seed: u64,
) -> Result<RecoveredGraph> {
    if budget == Some(0) {
        return invalid("budget must be positive");
    }
    let p = oracle.p();
    let mut ledger = SamplingLedger::new(budget);
    let mut neighborhoods: Vec<Option<Vec<usize>>> = vec![None; p];
    let mut found_at = vec![None; p];
    let mut settled_at = vec![None; p];
    let mut trace = Vec::new();
    let mut status = RunStatus::Completed;
    let mut ell = 1usize;
    let mut stage = 0usize;

    loop {
        if p <= 1 {
            break;
        }
        if neighborhoods.iter().all(Option::is_some) {
            status = RunStatus::Completed;
            break;
        }
        if ell >= 2 * p {
            status = RunStatus::StageLimit;
            break;
        }
        let unsettled: Vec<usize> = (0..p).filter(|&v| settled_at[v].is_none()).collect();
        let (g, h) = (rule.g(ell), rule.h(ell));
        let cost = unsettled.len() as u64 * (g + h) as u64;
        if ledger.would_exceed(cost) {
            status = RunStatus::BudgetExceeded;
            break;
        }
        let mut ctx = StageContext {
            ell,
            unsettled,
            select: None,
            verify: None,
        };
        for (n, slot, mut rng) in [
            (g, &mut ctx.select, select_stream(seed, stage)),
            (h, &mut ctx.verify, verify_stream(seed, stage)),
        ] {
            if n > 0 {
                let batch = oracle.draw(&ctx.unsettled, n, &mut rng)?;
                ledger.record(&ctx.unsettled, n);
                *slot = Some(EmpiricalCov::from_batch(&batch));
            }
        }

        let mut newly_found = Vec::new();
        let mut failure = None;
        for &i in &ctx.unsettled {
            if neighborhoods[i].is_some() {
                continue;
            }
            let outcome = rule
                .select(i, &ctx)
                .and_then(|cand| rule.verify(i, &cand, &ctx).map(|ok| (cand, ok)));
            match outcome {
                Ok((Candidate::Set(s), true)) => newly_found.push((i, s)),
                Ok(_) => {}
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        for (i, s) in &newly_found {
            debug_assert!(s.len() <= ell || ell == 1);
            neighborhoods[*i] = Some(s.clone());
            found_at[*i] = Some(ell);
        }
        let mut newly_settled = Vec::new();
        for &i in &ctx.unsettled {
            if let Some(nb) = &neighborhoods[i] {
                if nb.iter().all(|&j| neighborhoods[j].is_some()) {
                    settled_at[i] = Some(ell);
                    newly_settled.push(i);
                }
            }
        }
        trace.push(TraceRow {
            stage,
            ell,
            subset_size: ctx.unsettled.len(),
            n_select: g,
            n_verify: h,
            scalar_total: ledger.scalar_total(),
            newly_found: newly_found.iter().map(|(i, _)| *i).collect(),
            newly_settled,
        });
        if let Some(message) = failure {
            status = RunStatus::Failed(message);
            break;
        }
        ell *= 2;
        stage += 1;
    }

    Ok(RecoveredGraph {
        graph: or_graph(p, &neighborhoods),
        neighborhoods,
        found_at,
        settled_at,
        trace,
        ledger,
        status,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    AdPaCT,
    Ampl,
    /// Single-batch lasso neighborhood regression on all variables.
    Mb,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adpact" => Ok(Self::AdPaCT),
            "ampl" => Ok(Self::Ampl),
            "mb" => Ok(Self::Mb),
            other => invalid(format!("unknown algorithm `{other}` (expected adpact, ampl or mb)")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::AdPaCT => "adpact",
            Self::Ampl => "ampl",
            Self::Mb => "mb",
        })
    }
}

/// One run's settings. For [`Algorithm::Mb`], `c` is the number of full
/// samples `n` (rounded up) and `xi` is unused.
#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub algorithm: Algorithm,
    pub c: f64,
    pub xi: f64,
    pub lambda0: f64,
    pub budget: Option<u64>,
    pub seed: u64,
    pub subset_cap: u128,
}

impl EngineConfig {
    pub fn new(algorithm: Algorithm, c: f64, xi: f64, lambda0: f64) -> Self {
        Self {
            algorithm,
            c,
            xi,
            lambda0,
            budget: None,
            seed: 0,
            subset_cap: DEFAULT_SUBSET_CAP,
        }
    }

    pub fn run<T: Scalar, O: SamplingOracle<T>>(&self, oracle: &O) -> Result<RecoveredGraph> {
        let p = oracle.p();
        match self.algorithm {
            Algorithm::AdPaCT => {
                let mut rule = AdPaCT::new(self.c, T::lit(self.xi), p)?;
                rule.subset_cap = self.subset_cap;
                run_meta(oracle, &rule, self.budget, self.seed)
            }
            Algorithm::Ampl => {
                let rule = Ampl::new(self.c, T::lit(self.xi), T::lit(self.lambda0), p)?;
                run_meta(oracle, &rule, self.budget, self.seed)
            }
            Algorithm::Mb => {
                if !(self.c >= 1.0) {
                    return invalid("mb needs c (the sample count) to be at least 1");
                }
                let n = self.c.ceil() as usize;
                let lambda = Ampl::<T>::lambda_for(T::lit(self.lambda0), p, n);
                mb_passive(oracle, n, lambda, self.seed)
            }
        }
    }
}
