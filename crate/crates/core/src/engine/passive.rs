use crate::error::{invalid, Result};
use crate::estimators::{lasso_cd_gram, EmpiricalCov, LassoConfig};
use crate::rng::select_stream;
use crate::sampler::{SamplingLedger, SamplingOracle, TraceRow};
use crate::scalar::Scalar;

use super::{or_graph, RecoveredGraph, RunStatus};

/// Passive neighborhood regression: one batch of `n` samples of all `p`
/// variables (`n · p` scalars), one lasso per vertex against the rest, and
/// the union of the supports.
pub fn mb_passive<T: Scalar, O: SamplingOracle<T>>(oracle: &O, n: usize, lambda: T, seed: u64) -> Result<RecoveredGraph> {
    if n < 2 {
        return invalid(format!("passive regression needs n ≥ 2, got {n}"));
    }
    let p = oracle.p();
    let all: Vec<usize> = (0..p).collect();
    let mut ledger = SamplingLedger::unlimited();
    let batch = oracle.draw(&all, n, &mut select_stream(seed, 0))?;
    ledger.record(&all, n);
    let cov = EmpiricalCov::from_batch(&batch);
    let m = cov.matrix();
    let mut neighborhoods = vec![None; p];
    for i in 0..p {
        let others: Vec<usize> = (0..p).filter(|&v| v != i).collect();
        let nb = if others.is_empty() {
            Vec::new()
        } else {
            let gram = m.principal(&others);
            let xty: Vec<T> = others.iter().map(|&a| m[(a, i)]).collect();
            let sol = lasso_cd_gram(&gram, &xty, lambda, LassoConfig::default())?;
            sol.support().into_iter().map(|k| others[k]).collect()
        };
        neighborhoods[i] = Some(nb);
    }
    let trace = vec![TraceRow {
        stage: 0,
        ell: 0,
        subset_size: p,
        n_select: n,
        n_verify: 0,
        scalar_total: ledger.scalar_total(),
        newly_found: all.clone(),
        newly_settled: all,
    }];
    Ok(RecoveredGraph {
        graph: or_graph(p, &neighborhoods),
        found_at: vec![Some(0); p],
        settled_at: vec![Some(0); p],
        neighborhoods,
        trace,
        ledger,
        status: RunStatus::Completed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{hamming_distance, Graph};
    use crate::model::precision_from_graph;

    #[test]
    fn huge_lambda_is_edgeless() {
        let m = precision_from_graph(&Graph::path(3), 0.4, 0.0).unwrap();
        let out = mb_passive(&m, 100, 1e6, 1).unwrap();
        assert_eq!(out.graph.edge_count(), 0);
        assert_eq!(out.scalar_total(), 300);
    }

    #[test]
    fn chain_recovered_with_many_samples() {
        let m = precision_from_graph(&Graph::path(3), 0.4, 0.0).unwrap();
        let out = mb_passive(&m, 5000, 0.05, 2).unwrap();
        assert_eq!(hamming_distance(&out.graph, m.graph()).unwrap(), 0);
        assert_eq!(out.scalar_total(), 15_000);
        assert!(mb_passive(&m, 1, 0.05, 2).is_err());
    }
}
