//! Cheap pruning before the greedy phase.
//!
//! A node of degree `d` alone forces `λ₁ ≥ √d`, and a `T`-core forces
//! `λ₁ ≥ T`, so any solution must already break high degrees and dense cores.
//! Both are done here by cost, without counting walks.

use crate::error::Result;
use crate::graph::{Edge, Graph};
use crate::greedy::{run_edges, uniform, EdgeRun, GreedyConfig};
use crate::plan::{Item, Recorder, RemovalKind, RemovalPlan};
use crate::residual::Residual;

fn cheapest_first(graph: &Graph, ids: &mut [usize]) {
    ids.sort_by(|&a, &b| graph.edge_cost(a).total_cmp(&graph.edge_cost(b)).then(a.cmp(&b)));
}

fn max_degree_ids(graph: &Graph, t: f64) -> Vec<usize> {
    let cap = (t * t).ceil() as usize;
    let mut deg = graph.degrees();
    let mut gone = vec![false; graph.edge_count()];
    let mut removed = Vec::new();
    for v in 0..graph.node_count() {
        if deg[v] < cap || cap == 0 {
            continue;
        }
        let mut ids: Vec<usize> = graph.incident(v).map(|(_, id)| id).filter(|&id| !gone[id]).collect();
        cheapest_first(graph, &mut ids);
        for &id in ids.iter().take(deg[v] - cap + 1) {
            gone[id] = true;
            let e = graph.edge(id);
            deg[e.u] -= 1;
            deg[e.v] -= 1;
            removed.push(id);
        }
    }
    removed
}

fn density_ids(graph: &Graph, t: f64) -> Vec<usize> {
    let core = graph.k_core(t.ceil().max(1.0) as usize);
    if core.is_empty() {
        return Vec::new();
    }
    let mut mask = vec![false; graph.node_count()];
    core.iter().for_each(|&v| mask[v] = true);
    let mut ids = graph.induced_edges(&mask);
    let excess = (ids.len() as f64 - t * core.len() as f64 / 2.0 + 1.0).ceil();
    let count = excess.clamp(0.0, ids.len() as f64) as usize;
    cheapest_first(graph, &mut ids);
    ids.truncate(count);
    ids
}

fn split(graph: &Graph, ids: &[usize]) -> Result<(Vec<Edge>, Graph)> {
    let edges: Vec<Edge> = ids.iter().map(|&id| graph.edge(id)).collect();
    let rest = graph.remove_edges(&edges)?;
    Ok((edges, rest))
}

/// Prunes every node of degree at least `⌈T²⌉` down to `⌈T²⌉ − 1`, cheapest
/// incident edges first, visiting nodes in ascending id order.
pub fn max_degree_reduction(graph: &Graph, t: f64) -> Result<(Vec<Edge>, Graph)> {
    split(graph, &max_degree_ids(graph, t))
}

/// Removes the `⌈|E(C)| − T·|V(C)|/2 + 1⌉` cheapest edges of the `⌈T⌉`-core `C`.
pub fn density_reduction(graph: &Graph, t: f64) -> Result<(Vec<Edge>, Graph)> {
    split(graph, &density_ids(graph, t))
}

/// Max-degree pruning, then density pruning, then greedy walk hitting on what
/// is left. The plan labels the three phases.
pub fn greedy_walk_sparse(graph: &Graph, cfg: &GreedyConfig) -> Result<RemovalPlan> {
    cfg.validate()?;
    let t = cfg.threshold;
    let mut r = Residual::new(graph);
    let mut rec = Recorder::new(RemovalKind::EdgeRemoval, &r, cfg.power)?;

    let e1 = max_degree_ids(graph, t);
    for &id in &e1 {
        r.remove_edge(id);
        rec.push(Item::Edge(graph.edge(id)), graph.edge_cost(id), &r)?;
    }
    rec.end_phase("max-degree");

    let pruned = r.to_graph(graph);
    let e2: Vec<usize> = density_ids(&pruned, t)
        .into_iter()
        .map(|id| graph.edge_index(pruned.edge(id).u, pruned.edge(id).v).expect("subgraph edge"))
        .collect();
    for &id in &e2 {
        r.remove_edge(id);
        rec.push(Item::Edge(graph.edge(id)), graph.edge_cost(id), &r)?;
    }
    rec.end_phase("density");

    let n = graph.present_node_count();
    let run = EdgeRun {
        costs: graph.edge_costs(),
        n: n as f64,
        threshold: t,
        k: cfg.walk_length_for(n),
        scale: cfg.scale.unwrap_or(t),
        lazy: cfg.lazy(n, r.live_edge_count()),
        stop_rule: cfg.stop_rule,
        max_removals: cfg.max_removals.map(|b| b.saturating_sub(rec.len())),
        uniform_costs: uniform(graph.edge_costs()),
    };
    let done = run_edges(&run, r, &mut rec)?;
    rec.end_phase("greedy");
    Ok(rec.finish(done))
}
