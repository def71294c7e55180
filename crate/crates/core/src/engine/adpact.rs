use crate::combinatorics::{binomial, Combinations};
use crate::error::{invalid, Error, Result};
use crate::estimators::partial_corrs_given;
use crate::scalar::Scalar;

use super::{stage_samples, Candidate, NeighborhoodRule, StageContext};

pub const DEFAULT_SUBSET_CAP: u128 = 10_000_000;

/// Exhaustive conditioning-set search by partial-correlation thresholding.
///
/// At counter `ℓ` it tries subset sizes `k = ℓ/2 + 1, …, ℓ` in turn (plus
/// `k = 0` at `ℓ = 1`, so that isolated vertices can be found). A subset `S`
/// of the other unsettled vertices passes when every remaining unsettled `j`
/// has `|ρ̂_{i,j|S}| ≤ ξ`; the first size with a passing subset returns the
/// one with the smallest worst-case statistic. Verification only checks that
/// some subset was returned.
#[derive(Clone, Debug)]
pub struct AdPaCT<T> {
    pub c: f64,
    pub xi: T,
    pub p: usize,
    /// Largest number of subsets examined for one vertex in one stage.
    pub subset_cap: u128,
}

impl<T: Scalar> AdPaCT<T> {
    pub fn new(c: f64, xi: T, p: usize) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return invalid(format!("c must be positive, got {c}"));
        }
        if !(xi >= T::zero()) {
            return invalid(format!("xi must be nonnegative, got {xi}"));
        }
        Ok(Self {
            c,
            xi,
            p,
            subset_cap: DEFAULT_SUBSET_CAP,
        })
    }

    fn sizes(ell: usize) -> std::ops::RangeInclusive<usize> {
        if ell == 1 {
            0..=1
        } else {
            (ell / 2 + 1)..=ell
        }
    }
}

impl<T: Scalar> NeighborhoodRule<T> for AdPaCT<T> {
    fn g(&self, ell: usize) -> usize {
        stage_samples(self.c, ell, self.p)
    }

    fn h(&self, _ell: usize) -> usize {
        0
    }

    fn select(&self, i: usize, ctx: &StageContext<T>) -> Result<Candidate> {
        let cov = ctx.select_cov()?;
        let pool = ctx.others(i, &[]);
        for k in Self::sizes(ctx.ell) {
            if k > pool.len() {
                break;
            }
            let count = binomial(pool.len(), k);
            if count > self.subset_cap {
                return Err(Error::EnumerationCap {
                    subsets: count,
                    cap: self.subset_cap,
                });
            }
            let mut best: Option<(T, Vec<usize>)> = None;
            let mut combos = Combinations::new(&pool, k);
            while let Some(s) = combos.next_subset() {
                let targets = ctx.others(i, s);
                let worst = partial_corrs_given(cov, i, s, &targets)?
                    .into_iter()
                    .fold(T::zero(), |m, r| m.max(r.abs()));
                if worst <= self.xi && best.as_ref().is_none_or(|(b, _)| worst < *b) {
                    best = Some((worst, s.to_vec()));
                }
            }
            if let Some((_, s)) = best {
                return Ok(Candidate::Set(s));
            }
        }
        Ok(Candidate::NoCandidate)
    }

    fn verify(&self, _i: usize, candidate: &Candidate, _ctx: &StageContext<T>) -> Result<bool> {
        Ok(candidate.as_set().is_some())
    }
}
