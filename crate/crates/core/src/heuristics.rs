//! Score-based baselines: remove the best-scoring edge (or node) until the
//! stopping rule fires.
//!
//! Scores that agree to about ten significant digits are treated as equal so
//! that symmetric instances break ties by id rather than by rounding noise.

use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::greedy::Entry;
use crate::plan::{Item, Recorder, RemovalKind, RemovalPlan, Stop};
use crate::residual::Residual;
use crate::spectral::{line_pagerank, spectral_radius, PowerOptions};

const DAMPING: f64 = 0.85;
const PAGERANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scoring {
    /// Scores computed once on the input graph.
    Static,
    /// Scores recomputed on the residual graph after every removal.
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeScorer {
    Degree,
    EigenScore,
}

fn quantize(s: f64) -> f64 {
    f64::from_bits(s.to_bits() & !((1u64 << 20) - 1))
}

fn by_score_then_id(scores: &[f64]) -> Vec<usize> {
    let q: Vec<f64> = scores.iter().map(|&s| quantize(s)).collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| q[b].total_cmp(&q[a]).then(a.cmp(&b)));
    order
}

/// First index with the largest quantized score.
fn best(items: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    let mut top: Option<(usize, f64)> = None;
    for (i, s) in items {
        let s = quantize(s);
        if top.is_none_or(|(_, t)| s > t) {
            top = Some((i, s));
        }
    }
    top.map(|(i, _)| i)
}

struct Run<'g> {
    graph: &'g Graph,
    stop: Stop,
    r: Residual,
    rec: Recorder,
}

impl<'g> Run<'g> {
    fn new(graph: &'g Graph, stop: Stop, kind: RemovalKind) -> Result<Self> {
        match stop {
            Stop::Threshold(t) if !(t.is_finite() && t > 0.0) => {
                return Err(Error::Invalid(format!("threshold must be positive, got {t}")));
            }
            _ => {}
        }
        let r = Residual::new(graph);
        let rec = Recorder::new(kind, &r, PowerOptions::default())?;
        Ok(Run { graph, stop, r, rec })
    }

    fn satisfied(&self) -> bool {
        match self.stop {
            Stop::Threshold(t) => self.rec.lambda() < t,
            Stop::Budget(b) => self.rec.len() >= b,
        }
    }

    fn remove_edge(&mut self, id: usize) -> Result<()> {
        self.r.remove_edge(id);
        self.rec.push(Item::Edge(self.graph.edge(id)), self.graph.edge_cost(id), &self.r)?;
        Ok(())
    }

    fn remove_node(&mut self, v: usize) -> Result<()> {
        self.r.remove_node(v);
        self.rec.push(Item::Node(v), self.graph.node_cost(v), &self.r)?;
        Ok(())
    }

    fn finish(mut self) -> RemovalPlan {
        let done = self.satisfied();
        self.rec.end_phase("heuristic");
        self.rec.finish(done)
    }

    /// Removes edges in a fixed order, skipping any already gone.
    fn follow(mut self, order: &[usize]) -> Result<RemovalPlan> {
        for &id in order {
            if self.satisfied() {
                break;
            }
            if self.r.is_edge_alive(id) {
                self.remove_edge(id)?;
            }
        }
        Ok(self.finish())
    }
}

fn product_degree_scores(graph: &Graph) -> Vec<f64> {
    graph
        .edges()
        .iter()
        .map(|e| (graph.degree(e.u) * graph.degree(e.v)) as f64)
        .collect()
}

fn eigen_scores(graph: &Graph, x: &[f64]) -> Vec<f64> {
    graph.edges().iter().map(|e| (x[e.u] * x[e.v]).abs()).collect()
}

/// Largest `deg(u)·deg(v)` first, ties by edge id. Dynamic scoring uses
/// residual degrees.
pub fn product_degree_plan(graph: &Graph, stop: Stop) -> Result<RemovalPlan> {
    product_degree_plan_with(graph, stop, Scoring::Dynamic)
}

pub fn product_degree_plan_with(graph: &Graph, stop: Stop, scoring: Scoring) -> Result<RemovalPlan> {
    let run = Run::new(graph, stop, RemovalKind::EdgeRemoval)?;
    if scoring == Scoring::Static {
        return run.follow(&by_score_then_id(&product_degree_scores(graph)));
    }
    let mut run = run;
    // Degrees only fall, so a heap entry is an upper bound on its edge's
    // current score; an entry is taken once it matches.
    let score = |r: &Residual, id: usize| {
        let e = r.edge(id);
        (r.degree(e.u) * r.degree(e.v)) as f64
    };
    let mut heap: BinaryHeap<Entry> = (0..graph.edge_count())
        .map(|id| Entry {
            score: score(&run.r, id),
            id,
            version: 0,
        })
        .collect();
    while !run.satisfied() {
        let Some(top) = heap.pop() else { break };
        if !run.r.is_edge_alive(top.id) {
            continue;
        }
        let now = score(&run.r, top.id);
        if now < top.score {
            heap.push(Entry { score: now, ..top });
            continue;
        }
        run.remove_edge(top.id)?;
    }
    Ok(run.finish())
}

/// Largest `|x(u)·x(v)|` first, where `x` is the leading eigenvector.
pub fn eigen_score_plan(graph: &Graph, stop: Stop) -> Result<RemovalPlan> {
    eigen_score_plan_with(graph, stop, Scoring::Dynamic)
}

pub fn eigen_score_plan_with(graph: &Graph, stop: Stop, scoring: Scoring) -> Result<RemovalPlan> {
    let mut run = Run::new(graph, stop, RemovalKind::EdgeRemoval)?;
    if scoring == Scoring::Static {
        let order = by_score_then_id(&eigen_scores(graph, run.rec.eigenvector()));
        return run.follow(&order);
    }
    while !run.satisfied() {
        let x = run.rec.eigenvector();
        let r = &run.r;
        let pick = best(r.live_edges().map(|id| {
            let e = r.edge(id);
            (id, (x[e.u] * x[e.v]).abs())
        }));
        let Some(id) = pick else { break };
        run.remove_edge(id)?;
    }
    Ok(run.finish())
}

/// Largest line-graph PageRank first. Static by default.
pub fn line_pagerank_plan(graph: &Graph, stop: Stop) -> Result<RemovalPlan> {
    line_pagerank_plan_with(graph, stop, Scoring::Static)
}

pub fn line_pagerank_plan_with(graph: &Graph, stop: Stop, scoring: Scoring) -> Result<RemovalPlan> {
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let mut run = Run::new(graph, stop, RemovalKind::EdgeRemoval)?;
    if scoring == Scoring::Static {
        return run.follow(&by_score_then_id(&line_pagerank(graph, DAMPING, PAGERANK_TOL)));
    }
    while !run.satisfied() && run.r.live_edge_count() > 0 {
        let sub = run.r.to_graph(graph);
        let pr = line_pagerank(&sub, DAMPING, PAGERANK_TOL);
        let local = best(pr.iter().copied().enumerate()).expect("live edges");
        let e = sub.edge(local);
        let id = graph.edge_index(e.u, e.v).expect("subgraph edge");
        run.remove_edge(id)?;
    }
    Ok(run.finish())
}

/// Walks the static EigenScore and ProductDegree orderings side by side and
/// removes whichever of the two current candidates lowers λ₁ more. Equal
/// drops go to the EigenScore candidate.
pub fn hybrid_plan(graph: &Graph, stop: Stop) -> Result<RemovalPlan> {
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let mut run = Run::new(graph, stop, RemovalKind::EdgeRemoval)?;
    let pi = by_score_then_id(&eigen_scores(graph, run.rec.eigenvector()));
    let mu = by_score_then_id(&product_degree_scores(graph));
    let opts = PowerOptions::default();
    let (mut i, mut j) = (0, 0);
    while !run.satisfied() {
        while i < pi.len() && !run.r.is_edge_alive(pi[i]) {
            i += 1;
        }
        while j < mu.len() && !run.r.is_edge_alive(mu[j]) {
            j += 1;
        }
        let pick = match (pi.get(i), mu.get(j)) {
            (None, None) => break,
            (Some(&a), None) => {
                i += 1;
                a
            }
            (None, Some(&b)) => {
                j += 1;
                b
            }
            (Some(&a), Some(&b)) if a == b => {
                i += 1;
                a
            }
            (Some(&a), Some(&b)) => {
                let after = |id: usize| -> Result<f64> {
                    let mut trial = run.r.clone();
                    trial.remove_edge(id);
                    let step = run.rec.len() + 1;
                    spectral_radius(&trial, &opts, Some(run.rec.eigenvector()))
                        .map(|rep| rep.lambda1)
                        .map_err(|e| e.at_step(step))
                };
                if after(a)? <= after(b)? {
                    i += 1;
                    a
                } else {
                    j += 1;
                    b
                }
            }
        };
        run.remove_edge(pick)?;
    }
    Ok(run.finish())
}

/// Node removal by residual degree or by eigenvector magnitude, ties by id.
pub fn node_heuristic_plan(graph: &Graph, scorer: NodeScorer, stop: Stop) -> Result<RemovalPlan> {
    let mut run = Run::new(graph, stop, RemovalKind::NodeRemoval)?;
    while !run.satisfied() {
        let r = &run.r;
        let candidates = r.live_nodes().filter(|&v| r.degree(v) > 0);
        let pick = match scorer {
            NodeScorer::Degree => best(candidates.map(|v| (v, r.degree(v) as f64))),
            NodeScorer::EigenScore => {
                let x = run.rec.eigenvector();
                best(candidates.map(|v| (v, x[v].abs())))
            }
        };
        let Some(v) = pick else { break };
        run.remove_node(v)?;
    }
    Ok(run.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    #[test]
    fn product_degree_prefers_spokes() {
        // S5 with a pendant path hanging off leaf 1.
        let g = Graph::from_edges(8, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 6), (6, 7)]).unwrap();
        for scoring in [Scoring::Static, Scoring::Dynamic] {
            let plan = product_degree_plan_with(&g, Stop::Budget(1), scoring).unwrap();
            assert_eq!(plan.edges(), vec![Edge::new(0, 1)]);
        }
    }

    #[test]
    fn regular_graph_goes_in_id_order() {
        let g = Graph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let plan = product_degree_plan_with(&g, Stop::Budget(5), Scoring::Static).unwrap();
        assert_eq!(plan.edges(), g.edges().to_vec());
        let lp = line_pagerank_plan(&g, Stop::Budget(5)).unwrap();
        assert_eq!(lp.edges(), g.edges().to_vec());
    }

    #[test]
    fn dynamic_product_degree_tracks_residual_degrees() {
        // After (0,1) goes, (2,3) (3·3) beats the remaining (0,x) (2·…).
        let g = Graph::from_edges(
            8,
            [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 3), (2, 6), (3, 7)],
        )
        .unwrap();
        let plan = product_degree_plan(&g, Stop::Budget(2)).unwrap();
        assert_eq!(plan.edges(), vec![Edge::new(0, 1), Edge::new(2, 3)]);
        let fixed = product_degree_plan_with(&g, Stop::Budget(2), Scoring::Static).unwrap();
        assert_eq!(fixed.edges(), vec![Edge::new(0, 1), Edge::new(0, 2)]);
    }

    #[test]
    fn star_ties_go_in_id_order() {
        let g = star(4);
        let plan = eigen_score_plan(&g, Stop::Budget(4)).unwrap();
        assert_eq!(plan.edges(), g.edges().to_vec());
        let line = line_pagerank_plan(&star(3), Stop::Budget(3)).unwrap();
        assert_eq!(line.edges(), star(3).edges().to_vec());
    }

    #[test]
    fn barbell_loses_clique_edges_first() {
        let mut edges: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        edges.extend((7..11).flat_map(|a| (a + 1..11).map(move |b| (a, b))));
        edges.extend([(3, 4), (4, 5), (5, 6), (6, 7)]);
        let g = Graph::from_edges(11, edges).unwrap();
        for scoring in [Scoring::Static, Scoring::Dynamic] {
            let plan = eigen_score_plan_with(&g, Stop::Budget(2), scoring).unwrap();
            for e in plan.edges() {
                assert!(e.v <= 3 || e.u >= 7, "{e} is on the bridge");
            }
        }
    }

    #[test]
    fn threshold_stop_is_honoured() {
        let g = complete(6);
        for plan in [
            product_degree_plan(&g, Stop::Threshold(3.0)).unwrap(),
            eigen_score_plan(&g, Stop::Threshold(3.0)).unwrap(),
            line_pagerank_plan(&g, Stop::Threshold(3.0)).unwrap(),
            hybrid_plan(&g, Stop::Threshold(3.0)).unwrap(),
        ] {
            assert!(plan.completed);
            assert!(plan.final_lambda() < 3.0);
            assert!(plan.lambda_trajectory[plan.len() - 1] >= 3.0);
        }
    }

    #[test]
    fn hybrid_follows_the_bigger_clique() {
        let mut edges: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        edges.extend([(5, 6), (5, 7), (6, 7)]);
        let g = Graph::from_edges(8, edges).unwrap();
        let plan = hybrid_plan(&g, Stop::Budget(3)).unwrap();
        assert!(plan.edges().iter().all(|e| e.v < 5));
    }

    #[test]
    fn hybrid_takes_shared_first_candidate() {
        let g = star(4);
        let plan = hybrid_plan(&g, Stop::Budget(1)).unwrap();
        assert_eq!(plan.edges(), vec![Edge::new(0, 1)]);
    }

    #[test]
    fn node_heuristics() {
        for scorer in [NodeScorer::Degree, NodeScorer::EigenScore] {
            let plan = node_heuristic_plan(&star(5), scorer, Stop::Budget(1)).unwrap();
            assert_eq!(plan.nodes(), vec![0]);
        }
        let p5 = Graph::from_edges(5, (0..4).map(|i| (i, i + 1))).unwrap();
        let plan = node_heuristic_plan(&p5, NodeScorer::EigenScore, Stop::Budget(1)).unwrap();
        assert_eq!(plan.nodes(), vec![2]);
        let mut edges: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        edges.push((4, 5));
        let g = Graph::from_edges(6, edges).unwrap();
        let plan = node_heuristic_plan(&g, NodeScorer::Degree, Stop::Threshold(1.0)).unwrap();
        assert_eq!(plan.nodes()[0], 4);
        assert!(plan.final_lambda() < 1.0);
    }

    #[test]
    fn plans_are_deterministic() {
        let g = complete(7);
        let a = hybrid_plan(&g, Stop::Threshold(2.0)).unwrap();
        let b = hybrid_plan(&g, Stop::Threshold(2.0)).unwrap();
        assert_eq!(a.sequence, b.sequence);
        assert_eq!(a.lambda_trajectory, b.lambda_trajectory);
    }
}
