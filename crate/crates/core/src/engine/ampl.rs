use crate::error::{invalid, Result};
use crate::estimators::{lasso_cd_gram, partial_corrs_given, top_k_support, LassoConfig};
use crate::scalar::Scalar;

use super::{stage_samples, Candidate, NeighborhoodRule, StageContext};

/// Lasso proposal with partial-correlation verification.
///
/// Select regresses vertex `i` on the other unsettled vertices with
/// `λ = λ0 · sqrt(ln p / n)` and keeps at most the `ℓ` largest coefficients.
/// Verify accepts `S` when `|ρ̂_{i,j|S}| ≤ ξ` for every other unsettled `j`
/// outside `S`, using an independent sample set.
#[derive(Clone, Debug)]
pub struct Ampl<T> {
    pub c: f64,
    pub xi: T,
    pub lambda0: T,
    pub p: usize,
    pub lasso: LassoConfig<T>,
}

impl<T: Scalar> Ampl<T> {
    pub fn new(c: f64, xi: T, lambda0: T, p: usize) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return invalid(format!("c must be positive, got {c}"));
        }
        if !(xi >= T::zero()) {
            return invalid(format!("xi must be nonnegative, got {xi}"));
        }
        if !(lambda0 >= T::zero()) || !lambda0.is_finite() {
            return invalid(format!("lambda0 must be finite and nonnegative, got {lambda0}"));
        }
        Ok(Self {
            c,
            xi,
            lambda0,
            p,
            lasso: LassoConfig::default(),
        })
    }

    /// `λ0 · sqrt(ln p / n)`.
    pub fn lambda_for(lambda0: T, p: usize, n: usize) -> T {
        lambda0 * (T::from_count(p).ln() / T::from_count(n.max(1))).sqrt()
    }
}

impl<T: Scalar> NeighborhoodRule<T> for Ampl<T> {
    fn g(&self, ell: usize) -> usize {
        stage_samples(self.c, ell, self.p)
    }

    fn h(&self, ell: usize) -> usize {
        stage_samples(self.c, ell, self.p)
    }

    fn select(&self, i: usize, ctx: &StageContext<T>) -> Result<Candidate> {
        let cov = ctx.select_cov()?;
        let others = ctx.others(i, &[]);
        if others.is_empty() {
            return Ok(Candidate::Set(Vec::new()));
        }
        let li = cov.local(i).expect("vertex is unsettled");
        let lo: Vec<usize> = others.iter().map(|&v| cov.local(v).expect("unsettled")).collect();
        let gram = cov.matrix().principal(&lo);
        let xty: Vec<T> = lo.iter().map(|&a| cov.matrix()[(a, li)]).collect();
        let lambda = Self::lambda_for(self.lambda0, self.p, cov.n());
        let sol = lasso_cd_gram(&gram, &xty, lambda, self.lasso)?;
        let keep = top_k_support(&sol.beta, ctx.ell);
        Ok(Candidate::Set(keep.into_iter().map(|k| others[k]).collect()))
    }

    fn verify(&self, i: usize, candidate: &Candidate, ctx: &StageContext<T>) -> Result<bool> {
        let Some(s) = candidate.as_set() else {
            return Ok(false);
        };
        let targets = ctx.others(i, s);
        if targets.is_empty() {
            return Ok(true);
        }
        let rho = partial_corrs_given(ctx.verify_cov()?, i, s, &targets)?;
        Ok(rho.iter().all(|r| r.abs() <= self.xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EmpiricalCov;
    use crate::graph::{gen_single_clique_chain, Graph};
    use crate::model::{precision_from_graph, GaussianModel};
    use crate::rng::stream_rng;
    use crate::sampler::draw;

    fn ctx(model: &GaussianModel<f64>, ell: usize, n: usize, seed: u64) -> StageContext<f64> {
        let all: Vec<usize> = (0..model.p()).collect();
        let a = draw(model, &all, n, &mut stream_rng(seed, 0)).unwrap();
        let b = draw(model, &all, n, &mut stream_rng(seed, 1)).unwrap();
        StageContext {
            ell,
            unsettled: all,
            select: Some(EmpiricalCov::from_batch(&a)),
            verify: Some(EmpiricalCov::from_batch(&b)),
        }
    }

    #[test]
    fn sample_sizes_and_lambda() {
        let rule = Ampl::new(2.0, 0.1f64, 1.0, 100).unwrap();
        assert_eq!(NeighborhoodRule::<f64>::g(&rule, 2), 19);
        assert_eq!(NeighborhoodRule::<f64>::h(&rule, 2), 19);
        let l = Ampl::lambda_for(2.0f64, 100, 400);
        assert!((l - 2.0 * (100f64.ln() / 400.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chain_center() {
        let m = precision_from_graph(&Graph::path(3), 0.4, 0.0).unwrap();
        let rule = Ampl::new(1.0, 0.1, 1.0, 3).unwrap();
        let c = ctx(&m, 2, 5000, 4);
        let cand = rule.select(1, &c).unwrap();
        assert_eq!(cand, Candidate::Set(vec![0, 2]));
        assert!(rule.verify(1, &cand, &c).unwrap());
        // dropping a true neighbor leaves a large partial correlation
        assert!(!rule.verify(1, &Candidate::Set(vec![0]), &c).unwrap());
    }

    #[test]
    fn huge_lambda_gives_empty_set() {
        let m = precision_from_graph(&Graph::path(3), 0.4, 0.0).unwrap();
        let rule = Ampl::new(1.0, 0.1, 1e6, 3).unwrap();
        let c = ctx(&m, 2, 500, 5);
        assert_eq!(rule.select(1, &c).unwrap(), Candidate::Set(vec![]));
    }

    #[test]
    fn truncates_to_ell() {
        let g = gen_single_clique_chain(20, 12).unwrap();
        let m = precision_from_graph(&g, 0.08, 0.0).unwrap();
        let rule = Ampl::new(1.0, 0.1, 0.1, 20).unwrap();
        let c = ctx(&m, 4, 20_000, 6);
        let Candidate::Set(s) = rule.select(0, &c).unwrap() else {
            panic!("lasso always proposes a set");
        };
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|&v| v < 12 && v != 0));
    }

    #[test]
    fn nothing_left_to_check_is_accepted() {
        let m = precision_from_graph(&Graph::path(3), 0.4, 0.0).unwrap();
        let rule = Ampl::new(1.0, 0.0, 1.0, 3).unwrap();
        let mut c = ctx(&m, 2, 50, 7);
        c.unsettled = vec![0, 1, 2];
        assert!(rule.verify(1, &Candidate::Set(vec![0, 2]), &c).unwrap());
    }
}
