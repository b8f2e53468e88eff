//! Exhaustive minimum-cost removal for tiny graphs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::plan::{Item, RemovalKind};
use crate::residual::Residual;
use crate::spectral::{spectral_radius, PowerOptions};

pub const BRUTE_MAX_EDGES: usize = 16;
pub const BRUTE_MAX_NODES: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct BruteForce {
    pub cost: f64,
    pub witness: Vec<Item>,
    /// False when no subset within the size bound achieves λ₁ < T; `cost`
    /// and `witness` are then meaningless.
    pub feasible: bool,
    /// Subsets whose λ₁ was evaluated.
    pub evaluated: usize,
}

/// Cheapest set of edges (or nodes) whose removal leaves λ₁ < `t`.
///
/// Subsets are visited in order of (cost, size, bitmask); the first feasible
/// one is optimal because feasibility is monotone under further removal.
pub fn brute_force_srm(graph: &Graph, t: f64, kind: RemovalKind, max_subset_size: Option<usize>) -> Result<BruteForce> {
    let (universe, limit) = match kind {
        RemovalKind::EdgeRemoval => (graph.edge_count(), BRUTE_MAX_EDGES),
        RemovalKind::NodeRemoval => (graph.node_count(), BRUTE_MAX_NODES),
    };
    if universe > limit {
        return Err(Error::SizeGuard(format!("{universe} items, limit {limit}")));
    }
    let cost_of = |i: usize| match kind {
        RemovalKind::EdgeRemoval => graph.edge_cost(i),
        RemovalKind::NodeRemoval => graph.node_cost(i),
    };
    let bound = max_subset_size.unwrap_or(universe);
    let mut subsets: Vec<(f64, u32, u32)> = (0u32..1 << universe)
        .filter(|m| m.count_ones() as usize <= bound)
        .map(|m| {
            let c: f64 = (0..universe).filter(|&i| m >> i & 1 == 1).map(cost_of).sum();
            (c, m.count_ones(), m)
        })
        .collect();
    subsets.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let opts = PowerOptions::default();
    let base = Residual::new(graph);
    for (evaluated, &(cost, _, mask)) in subsets.iter().enumerate() {
        let mut r = base.clone();
        let mut witness = Vec::new();
        for i in (0..universe).filter(|&i| mask >> i & 1 == 1) {
            match kind {
                RemovalKind::EdgeRemoval => {
                    r.remove_edge(i);
                    witness.push(Item::Edge(graph.edge(i)));
                }
                RemovalKind::NodeRemoval => {
                    r.remove_node(i);
                    witness.push(Item::Node(i));
                }
            }
        }
        if spectral_radius(&r, &opts, None)?.lambda1 < t {
            return Ok(BruteForce {
                cost,
                witness,
                feasible: true,
                evaluated: evaluated + 1,
            });
        }
    }
    Ok(BruteForce {
        cost: f64::INFINITY,
        witness: Vec::new(),
        feasible: false,
        evaluated: subsets.len(),
    })
}
