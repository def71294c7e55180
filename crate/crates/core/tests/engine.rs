use activegm::engine::{stage_samples, Algorithm, EngineConfig};
use activegm::graph::{gen_multi_clique_chain, gen_power_law};
use activegm::model::{default_edge_weight, precision_from_graph};
use activegm::{degree_stats, hamming_distance, GaussianModel, GaussianModelF32, Graph, RunStatus};

fn chain_model() -> GaussianModel<f64> {
    precision_from_graph(&Graph::path(6), 0.4, 0.0).unwrap()
}

#[test]
fn every_algorithm_recovers_a_strong_chain() {
    let model = chain_model();
    for (alg, c) in [(Algorithm::Ampl, 200.0), (Algorithm::AdPaCT, 200.0), (Algorithm::Mb, 2000.0)] {
        let mut cfg = EngineConfig::new(alg, c, 0.15, 1.5);
        cfg.seed = 3;
        let run = cfg.run(&model).unwrap();
        assert_eq!(run.status, RunStatus::Completed, "{alg}");
        assert_eq!(run.graph, *model.graph(), "{alg}");
    }
}

#[test]
fn runs_replay_from_the_seed() {
    let g = gen_power_law(25, 4, 1, 8).unwrap();
    let model = precision_from_graph(&g, default_edge_weight(&g), 0.0).unwrap();
    let cfg = EngineConfig::new(Algorithm::Ampl, 30.0, 0.1, 1.5);
    let a = cfg.run(&model).unwrap();
    let b = cfg.run(&model).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.neighborhoods, b.neighborhoods);
    let mut other = cfg.clone();
    other.seed = 1;
    assert_ne!(other.run(&model).unwrap().trace, a.trace);
}

#[test]
fn ledger_matches_trace_and_stage_costs() {
    let g = gen_multi_clique_chain(20, &[5]).unwrap();
    let model = precision_from_graph(&g, default_edge_weight(&g), 0.0).unwrap();
    let run = EngineConfig::new(Algorithm::Ampl, 20.0, 0.1, 1.5).run(&model).unwrap();
    assert!(run.ledger.audit());
    let mut total = 0u64;
    for row in &run.trace {
        assert_eq!(row.n_select, stage_samples(20.0, row.ell, 20));
        assert_eq!(row.n_verify, row.n_select);
        total += (row.subset_size * (row.n_select + row.n_verify)) as u64;
        assert_eq!(row.scalar_total, total);
    }
    assert_eq!(run.scalar_total(), total);
    assert_eq!(run.effective_samples(), total as f64 / 20.0);
}

#[test]
fn budget_stops_before_the_first_unaffordable_stage() {
    let model = chain_model();
    let mut cfg = EngineConfig::new(Algorithm::Ampl, 50.0, 0.1, 1.5);
    let first = 6 * 2 * stage_samples(50.0, 1, 6) as u64;
    cfg.budget = Some(first);
    let run = cfg.run(&model).unwrap();
    assert_eq!(run.status, RunStatus::BudgetExceeded);
    assert_eq!(run.scalar_total(), first);
    assert_eq!(run.trace.len(), 1);
}

#[test]
fn single_precision_path_runs() {
    let g = Graph::path(5);
    let model: GaussianModelF32 = precision_from_graph(&g, 0.4f32, 0.0).unwrap();
    let run = EngineConfig::new(Algorithm::Ampl, 200.0, 0.15, 1.5).run(&model).unwrap();
    assert_eq!(run.status, RunStatus::Completed);
    assert_eq!(hamming_distance(&run.graph, &g).unwrap(), 0);
}

#[test]
fn model_text_round_trip() {
    let g = gen_multi_clique_chain(9, &[3, 3]).unwrap();
    let model = precision_from_graph(&g, default_edge_weight(&g), 0.25).unwrap();
    let back: GaussianModel<f64> = GaussianModel::parse_text(&model.to_text()).unwrap();
    assert_eq!(back.graph(), model.graph());
    assert!(back.precision().max_abs_diff(model.precision()) < 1e-15);
    assert!(back.covariance().max_abs_diff(model.covariance()) < 1e-12);
}

#[test]
fn edge_list_round_trip_and_stats() {
    let g = gen_power_law(50, 5, 2, 21).unwrap();
    let back = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
    assert_eq!(back, g);
    let stats = degree_stats(&g);
    assert!(stats.local_max.iter().zip(&stats.degrees).all(|(m, d)| m >= d));
    assert!(stats.dbar_max_f64() <= stats.d_max as f64);
}
