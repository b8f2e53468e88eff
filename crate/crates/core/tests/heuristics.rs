mod common;

use common::dense_lambda;
use immunet::generate::{barabasi_albert, erdos_renyi};
use immunet::*;
use std::collections::HashSet;

fn all_edge_plans(g: &Graph, stop: Stop) -> Vec<(&'static str, RemovalPlan)> {
    vec![
        ("product-degree", product_degree_plan(g, stop).unwrap()),
        ("product-degree static", product_degree_plan_with(g, stop, Scoring::Static).unwrap()),
        ("eigen-score", eigen_score_plan(g, stop).unwrap()),
        ("eigen-score static", eigen_score_plan_with(g, stop, Scoring::Static).unwrap()),
        ("line-pagerank", line_pagerank_plan(g, stop).unwrap()),
        ("line-pagerank dynamic", line_pagerank_plan_with(g, stop, Scoring::Dynamic).unwrap()),
        ("hybrid", hybrid_plan(g, stop).unwrap()),
    ]
}

#[test]
fn threshold_stops_are_honest() {
    for seed in 0..6 {
        let g = if seed % 2 == 0 { erdos_renyi(80, 0.08, seed).unwrap() } else { barabasi_albert(80, 2, seed).unwrap() };
        let t = 0.6 * dense_lambda(&g);
        for (name, p) in all_edge_plans(&g, Stop::Threshold(t)) {
            assert!(p.completed, "{name}");
            assert!(dense_lambda(&p.apply(&g).unwrap()) < t, "{name} seed {seed}");
            // Stopping is as early as the trajectory allows.
            assert!(p.lambda_trajectory[..p.len()].iter().all(|&l| l >= t), "{name}");
            let distinct: HashSet<_> = p.edges().into_iter().collect();
            assert_eq!(distinct.len(), p.len(), "{name}");
        }
    }
}

#[test]
fn budgets_are_respected() {
    let g = barabasi_albert(100, 3, 2).unwrap();
    for (name, p) in all_edge_plans(&g, Stop::Budget(17)) {
        assert_eq!(p.len(), 17, "{name}");
        assert_eq!(p.lambda_trajectory.len(), 18, "{name}");
    }
}

#[test]
fn static_heuristics_fall_for_the_adversarial_instance() {
    for tp in [3, 4] {
        let q = 3 * tp;
        let inst = make_adversarial(tp, q).unwrap();
        let g = &inst.graph;
        let t = tp as f64;
        let w = g.remove_edges(&inst.witness_edges).unwrap();
        assert!(dense_lambda(&w) < t);
        for p in [
            product_degree_plan_with(g, Stop::Threshold(t), Scoring::Static).unwrap(),
            eigen_score_plan_with(g, Stop::Threshold(t), Scoring::Static).unwrap(),
            line_pagerank_plan_with(g, Stop::Threshold(t), Scoring::Static).unwrap(),
            hybrid_plan(g, Stop::Threshold(t)).unwrap(),
        ] {
            assert!(p.len() >= q);
            assert!(p.len() > inst.witness_edges.len());
        }
    }
}

#[test]
fn greedy_beats_static_heuristics_on_the_adversarial_instance() {
    let inst = make_adversarial(4, 12).unwrap();
    let t = 4.0;
    let cfg = GreedyConfig::new(t).with_stop_rule(StopRule::LambdaDirect);
    let gw = greedy_walk_edges(&inst.graph, &cfg).unwrap();
    let pd = product_degree_plan_with(&inst.graph, Stop::Threshold(t), Scoring::Static).unwrap();
    assert!(gw.len() < pd.len());
}

#[test]
fn node_heuristics_stop_below_threshold() {
    let g = barabasi_albert(150, 3, 8).unwrap();
    let t = 0.5 * dense_lambda(&g);
    for scorer in [NodeScorer::Degree, NodeScorer::EigenScore] {
        let p = node_heuristic_plan(&g, scorer, Stop::Threshold(t)).unwrap();
        assert!(p.completed);
        assert!(dense_lambda(&p.apply(&g).unwrap()) < t);
    }
}
