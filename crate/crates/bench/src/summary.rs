//! Aggregates over trial reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::battery::TrialReport;

/// Mean effective samples needed to reach a recovery target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscSummary {
    pub algo: String,
    pub graph: String,
    pub target: f64,
    /// `None` when no trial reached the target.
    pub mean_esc: Option<f64>,
    pub trials: usize,
    pub censored: usize,
}

/// Whether a run reaches `target`: exact recovery for `target ≥ 1`,
/// otherwise at least that fraction of true edges.
pub fn attains(r: &TrialReport, target: f64) -> bool {
    if target >= 1.0 {
        r.exact
    } else {
        r.edges_correct_fraction >= target
    }
}

/// For each `(algo, graph)` and each trial (identified by its seed), takes
/// the run with the fewest effective samples that reaches `target` and
/// averages those counts over the trials that reached it. Trials that never
/// do are counted as censored.
pub fn esc_summary(reports: &[TrialReport], target: f64) -> Vec<EscSummary> {
    let mut groups: BTreeMap<(&str, &str), BTreeMap<u64, Vec<&TrialReport>>> = BTreeMap::new();
    for r in reports {
        groups
            .entry((&r.algo, &r.graph))
            .or_default()
            .entry(r.seed)
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((algo, graph), by_trial)| {
            let trials = by_trial.len();
            let hits: Vec<f64> = by_trial
                .into_values()
                .filter_map(|runs| {
                    runs.into_iter()
                        .filter(|r| attains(r, target))
                        .map(|r| r.effective_samples)
                        .min_by(f64::total_cmp)
                })
                .collect();
            let mean_esc = (!hits.is_empty()).then(|| hits.iter().sum::<f64>() / hits.len() as f64);
            EscSummary {
                algo: algo.to_string(),
                graph: graph.to_string(),
                target,
                mean_esc,
                trials,
                censored: trials - hits.len(),
            }
        })
        .collect()
}

/// Mean Hamming error per `(algo, graph, c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub algo: String,
    pub graph: String,
    pub c: f64,
    pub mean_effective_samples: f64,
    pub mean_hamming: f64,
    pub trials: usize,
}

/// One row per `(algo, graph, c)`, sorted by algorithm, graph and then mean
/// effective samples.
pub fn hamming_curve(reports: &[TrialReport]) -> Vec<CurveRow> {
    let mut groups: BTreeMap<(&str, &str, u64), Vec<&TrialReport>> = BTreeMap::new();
    for r in reports {
        groups.entry((&r.algo, &r.graph, r.c.to_bits())).or_default().push(r);
    }
    let mut rows: Vec<CurveRow> = groups
        .into_iter()
        .map(|((algo, graph, c), runs)| {
            let k = runs.len() as f64;
            CurveRow {
                algo: algo.to_string(),
                graph: graph.to_string(),
                c: f64::from_bits(c),
                mean_effective_samples: runs.iter().map(|r| r.effective_samples).sum::<f64>() / k,
                mean_hamming: runs.iter().map(|r| r.hamming as f64).sum::<f64>() / k,
                trials: runs.len(),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        (&a.algo, &a.graph)
            .cmp(&(&b.algo, &b.graph))
            .then(a.mean_effective_samples.total_cmp(&b.mean_effective_samples))
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(algo: &str, seed: u64, c: f64, eff: f64, hamming: usize, frac: f64) -> TrialReport {
        TrialReport {
            algo: algo.into(),
            graph: "g".into(),
            seed,
            c,
            hamming,
            exact: hamming == 0,
            scalar_total: (eff * 60.0) as u64,
            effective_samples: eff,
            edges_correct_fraction: frac,
            status: "completed".into(),
        }
    }

    #[test]
    fn smallest_grid_value_when_all_exact() {
        let rs: Vec<_> = [100.0, 130.0, 169.0]
            .iter()
            .flat_map(|&n| (0..3).map(move |s| report("mb", s, n, n, 0, 1.0)))
            .collect();
        let s = &esc_summary(&rs, 1.0)[0];
        assert_eq!(s.mean_esc, Some(100.0));
        assert_eq!((s.trials, s.censored), (3, 0));
    }

    #[test]
    fn single_exact_trial() {
        let s = &esc_summary(&[report("ampl", 1, 20.0, 1202.0, 0, 1.0)], 1.0)[0];
        assert_eq!(s.mean_esc, Some(1202.0));
    }

    #[test]
    fn censoring() {
        let rs = vec![report("ampl", 1, 1.0, 10.0, 5, 0.5), report("ampl", 2, 1.0, 12.0, 4, 0.6)];
        let s = &esc_summary(&rs, 0.9)[0];
        assert_eq!(s.mean_esc, None);
        assert_eq!(s.censored, 2);
    }

    #[test]
    fn partial_target_uses_edge_fraction() {
        let rs = vec![
            report("ampl", 1, 1.0, 10.0, 3, 0.92),
            report("ampl", 1, 2.0, 20.0, 0, 1.0),
            report("ampl", 2, 1.0, 11.0, 9, 0.5),
            report("ampl", 2, 2.0, 22.0, 0, 1.0),
        ];
        let s90 = esc_summary(&rs, 0.9)[0].mean_esc.unwrap();
        let s100 = esc_summary(&rs, 1.0)[0].mean_esc.unwrap();
        assert_eq!(s90, 16.0);
        assert_eq!(s100, 21.0);
        assert!(s90 <= s100);
    }

    #[test]
    fn curve_rows() {
        assert!(hamming_curve(&[]).is_empty());
        let rs = vec![
            report("ampl", 1, 2.0, 20.0, 0, 1.0),
            report("ampl", 2, 2.0, 22.0, 2, 0.9),
            report("ampl", 1, 1.0, 10.0, 4, 0.5),
        ];
        let rows = hamming_curve(&rs);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].c, 1.0);
        assert_eq!(rows[1].mean_effective_samples, 21.0);
        assert_eq!(rows[1].mean_hamming, 1.0);
    }
}
