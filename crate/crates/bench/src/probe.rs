//! Empirical concentration of sample partial correlations.

use activegm::estimators::{empirical_partial_corr_inv, EmpiricalCov};
use activegm::model::population_partial_correlation;
use activegm::rng::{derive_seed, stream_rng};
use activegm::sampler::draw;
use activegm::{Error, GaussianModel};
use rayon::prelude::*;

use crate::error::Result;

pub const MIN_REPLICATES: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub n: usize,
    /// Share of replicates with `|ρ̂ - ρ| ≥ eps`.
    pub frequency: f64,
    pub replicates: usize,
}

/// For each `n` in `n_grid`, draws `replicates` independent batches of
/// `X_{{i, j} ∪ S}` and reports how often the sample partial correlation
/// lands at least `eps` away from the population value.
pub fn lemma4_decay_probe(
    model: &GaussianModel<f64>,
    i: usize,
    j: usize,
    s: &[usize],
    eps: f64,
    n_grid: &[usize],
    replicates: usize,
    seed: u64,
) -> Result<Vec<DecayRow>> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_REPLICATES} replicates, got {replicates}")).into());
    }
    if let Some(&n) = n_grid.iter().find(|&&n| n < s.len() + 3) {
        return Err(Error::InsufficientSamples {
            n,
            needed: s.len() + 2,
        }
        .into());
    }
    let rho = population_partial_correlation(model.covariance(), i, j, s)?;
    let mut support: Vec<usize> = s.iter().copied().chain([i, j]).collect();
    support.sort_unstable();
    n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let grid_seed = derive_seed(seed, k as u64);
            let hits = (0..replicates)
                .into_par_iter()
                .map(|r| -> Result<usize> {
                    let batch = draw(model, &support, n, &mut stream_rng(grid_seed, r as u64))?;
                    let est = empirical_partial_corr_inv(&EmpiricalCov::from_batch(&batch), i, j, s)?;
                    Ok(usize::from((est - rho).abs() >= eps))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum::<usize>();
            Ok(DecayRow {
                n,
                frequency: hits as f64 / replicates as f64,
                replicates,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use activegm::graph::Graph;
    use activegm::model::precision_from_graph;

    #[test]
    fn huge_eps_never_hit() {
        let m = precision_from_graph(&Graph::path(3), 0.4, 0.0).unwrap();
        let rows = lemma4_decay_probe(&m, 0, 1, &[], 2.0, &[10, 40], 500, 1).unwrap();
        assert!(rows.iter().all(|r| r.frequency == 0.0));
    }

    #[test]
    fn refuses_bad_requests() {
        let m = precision_from_graph(&Graph::path(3), 0.4, 0.0).unwrap();
        assert!(lemma4_decay_probe(&m, 0, 1, &[2], 0.1, &[3, 50], 500, 1).is_err());
        assert!(lemma4_decay_probe(&m, 0, 1, &[], 0.1, &[50], 100, 1).is_err());
    }
}
