use crate::error::Result;
use crate::graph::Graph;
use crate::scalar::Scalar;

use super::{Candidate, NeighborhoodRule, StageContext};

/// Reads the answer off a known graph: proposes `N(i)` once `ℓ ≥ d_i` and
/// accepts a candidate exactly when it contains `N(i)`. Useful for checking
/// the loop's bookkeeping without any statistics.
#[derive(Clone, Debug)]
pub struct TruthRule {
    graph: Graph,
    pub select_samples_per_ell: usize,
    pub verify_samples_per_ell: usize,
}

impl TruthRule {
    pub fn new(graph: Graph) -> Self {
        Self {
            graph,
            select_samples_per_ell: 1,
            verify_samples_per_ell: 1,
        }
    }
}

impl<T: Scalar> NeighborhoodRule<T> for TruthRule {
    fn g(&self, ell: usize) -> usize {
        self.select_samples_per_ell * ell
    }

    fn h(&self, ell: usize) -> usize {
        self.verify_samples_per_ell * ell
    }

    fn select(&self, i: usize, ctx: &StageContext<T>) -> Result<Candidate> {
        let nb = self.graph.neighbors(i);
        if nb.len() > ctx.ell {
            return Ok(Candidate::NoCandidate);
        }
        debug_assert!(nb.iter().all(|j| ctx.unsettled.binary_search(j).is_ok()));
        Ok(Candidate::Set(nb.iter().copied().collect()))
    }

    fn verify(&self, i: usize, candidate: &Candidate, _ctx: &StageContext<T>) -> Result<bool> {
        Ok(candidate
            .as_set()
            .is_some_and(|s| self.graph.neighbors(i).iter().all(|j| s.contains(j))))
    }
}
