//! Seeded trial batteries.
//!
//! Trial `t` of a battery with root seed `s` uses the seed
//! `derive_seed(s, t)` for every algorithm and grid value, so runs that share
//! a trial index see the same graph (for random families) and the same
//! sample streams. Jobs run in parallel but the report list is always in job
//! order.

use activegm::engine::{stage_samples, Algorithm, EngineConfig, RecoveredGraph};
use activegm::graph::{gen_multi_clique_chain, gen_power_law, gen_single_clique_chain};
use activegm::model::{default_edge_weight, precision_from_weights};
use activegm::rng::derive_seed;
use activegm::{degree_stats, hamming_distance, sufficient_budget, GaussianModel, Graph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{BenchConfig, BudgetRule, GraphFamily, ModelSpec};
use crate::error::Result;

/// One run of one algorithm on one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub algo: String,
    pub graph: String,
    pub seed: u64,
    pub c: f64,
    pub hamming: usize,
    pub exact: bool,
    pub scalar_total: u64,
    pub effective_samples: f64,
    /// Fraction of true edges present in the estimate.
    pub edges_correct_fraction: f64,
    pub status: String,
}

impl TrialReport {
    pub fn from_run(algo: &str, graph: &str, seed: u64, c: f64, truth: &Graph, run: &RecoveredGraph) -> Result<Self> {
        let hamming = hamming_distance(truth, &run.graph)?;
        Ok(Self {
            algo: algo.to_string(),
            graph: graph.to_string(),
            seed,
            c,
            hamming,
            exact: hamming == 0,
            scalar_total: run.scalar_total(),
            effective_samples: run.effective_samples(),
            edges_correct_fraction: edges_correct_fraction(truth, &run.graph),
            status: run.status.label(),
        })
    }

    fn from_error(algo: &str, graph: &str, seed: u64, c: f64, truth: &Graph, err: &dyn std::fmt::Display) -> Self {
        Self {
            algo: algo.to_string(),
            graph: graph.to_string(),
            seed,
            c,
            hamming: truth.edge_count(),
            exact: truth.edge_count() == 0,
            scalar_total: 0,
            effective_samples: 0.0,
            edges_correct_fraction: edges_correct_fraction(truth, &Graph::empty(truth.p())),
            status: format!("error: {err}"),
        }
    }
}

/// `1 - missed / |E|`, or 1 when the true graph has no edges.
pub fn edges_correct_fraction(truth: &Graph, estimate: &Graph) -> f64 {
    let total = truth.edge_count();
    if total == 0 {
        return 1.0;
    }
    let missed = truth.edges().filter(|&(i, j)| !estimate.has_edge(i, j)).count();
    1.0 - missed as f64 / total as f64
}

/// The battery's graph for trial seed `trial_seed`.
pub fn build_graph(cfg: &BenchConfig, trial_seed: u64) -> Result<Graph> {
    Ok(match &cfg.family {
        GraphFamily::SingleClique { clique } => gen_single_clique_chain(cfg.p, *clique)?,
        GraphFamily::MultiClique { cliques } => gen_multi_clique_chain(cfg.p, cliques)?,
        GraphFamily::PowerLaw {
            seed_size,
            edges_per_step,
        } => gen_power_law(cfg.p, *seed_size, *edges_per_step, trial_seed)?,
        GraphFamily::Path => Graph::path(cfg.p),
        GraphFamily::Star => Graph::star(cfg.p),
        GraphFamily::File(path) => Graph::parse_edge_list(&std::fs::read_to_string(path)?)?,
    })
}

/// Precision model on `g`; edges among the first `clique_span` vertices use
/// the clique weight, all others the chain weight.
pub fn build_model(spec: &ModelSpec, g: &Graph, clique_span: usize) -> Result<GaussianModel<f64>> {
    let base = spec.edge_weight.unwrap_or_else(|| default_edge_weight(g));
    let clique = spec.clique_weight.unwrap_or(base);
    let chain = spec.chain_weight.unwrap_or(base);
    Ok(precision_from_weights(g, spec.diag_boost, |i, j| {
        if i < clique_span && j < clique_span {
            clique
        } else {
            chain
        }
    })?)
}

/// Budget for one active run at constant `c`.
pub fn budget_for(rule: BudgetRule, algorithm: Algorithm, c: f64, g: &Graph) -> Option<u64> {
    let p = g.p();
    match rule {
        BudgetRule::Unlimited => None,
        BudgetRule::Fixed(b) => Some(b),
        BudgetRule::Scaled(factor) => {
            let stats = degree_stats(g);
            Some((factor * c * stats.dbar_max_f64() * p as f64 * (p as f64).ln()).ceil() as u64)
        }
        BudgetRule::Sufficient => {
            let stats = degree_stats(g);
            let g_fn = |l: usize| stage_samples(c, l, p) as u64;
            Some(match algorithm {
                Algorithm::AdPaCT => sufficient_budget(&stats, g_fn, |_| 0),
                _ => sufficient_budget(&stats, g_fn, g_fn),
            })
        }
    }
}

struct Trial {
    seed: u64,
    graph: Graph,
    model: GaussianModel<f64>,
}

#[derive(Clone, Copy)]
struct Job {
    trial: usize,
    algorithm: Algorithm,
    /// Grid value: the constant `c`, or `n` for passive runs.
    value: f64,
}

fn run_job(cfg: &BenchConfig, trial: &Trial, algorithm: Algorithm, value: f64, label: &str, reported_c: f64) -> TrialReport {
    let mut engine = EngineConfig::new(
        algorithm,
        value,
        cfg.xi,
        if algorithm == Algorithm::Mb { cfg.mb_lambda0 } else { cfg.lambda0 },
    );
    engine.seed = trial.seed;
    engine.subset_cap = cfg.subset_cap;
    if algorithm != Algorithm::Mb {
        engine.budget = budget_for(cfg.budget, algorithm, value, &trial.graph);
    }
    let outcome = engine
        .run(&trial.model)
        .map_err(Into::into)
        .and_then(|run| TrialReport::from_run(label, &cfg.name, trial.seed, reported_c, &trial.graph, &run));
    outcome.unwrap_or_else(|e| TrialReport::from_error(label, &cfg.name, trial.seed, reported_c, &trial.graph, &e))
}

/// Runs every algorithm at every grid value for every trial. With
/// `mb.paired`, each active run is followed by a passive run whose sample
/// count equals that run's effective samples, reported as `mb_paired` with
/// the active run's `c`.
pub fn run_battery(cfg: &BenchConfig) -> Result<Vec<TrialReport>> {
    if cfg.trials == 0 {
        return Ok(Vec::new());
    }
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, t as u64);
            let graph = build_graph(cfg, seed)?;
            let model = build_model(&cfg.model, &graph, cfg.family.clique_span())?;
            Ok(Trial { seed, graph, model })
        })
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for &algorithm in &cfg.algorithms {
        let grid: Vec<f64> = match algorithm {
            Algorithm::Ampl => cfg.ampl_c.clone(),
            Algorithm::AdPaCT => cfg.adpact_c.clone(),
            Algorithm::Mb => cfg.mb_grid().into_iter().map(|n| n as f64).collect(),
        };
        for value in grid {
            for trial in 0..cfg.trials {
                jobs.push(Job {
                    trial,
                    algorithm,
                    value,
                });
            }
        }
    }
    let mut reports: Vec<TrialReport> = jobs
        .par_iter()
        .map(|job| {
            let label = job.algorithm.to_string();
            run_job(cfg, &trials[job.trial], job.algorithm, job.value, &label, job.value)
        })
        .collect();

    if cfg.mb_paired {
        let paired: Vec<TrialReport> = jobs
            .par_iter()
            .zip(reports.par_iter())
            .filter(|(job, _)| job.algorithm == Algorithm::Ampl)
            .map(|(job, active)| {
                let n = active.effective_samples.round().max(2.0);
                run_job(cfg, &trials[job.trial], Algorithm::Mb, n, "mb_paired", job.value)
            })
            .collect();
        reports.extend(paired);
    }
    Ok(reports)
}
