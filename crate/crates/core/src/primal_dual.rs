//! Primal-dual partial cover of closed walks by edges.
//!
//! The set system (walks hit by each edge) is never built. Each edge keeps a
//! dual accumulator `z_e`; a round raises every eligible `z_e` by `x` times
//! the edge's current coverage, where `x` is the smallest step that makes some
//! edge tight (`z_e = c_e`), and that edge is picked. Coverage is recomputed
//! on the residual graph every round.
//!
//! Progress is measured as the exact drop of `trace(Ãᵏ)` from the starting
//! graph, so a cover that claims `σ` walks really destroyed them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::greedy::{GreedyConfig, WalkState};
use crate::plan::{Item, Recorder, RemovalKind, RemovalPlan};
use crate::residual::Residual;

#[derive(Debug, Clone, Serialize)]
pub struct CoverState {
    pub picked: Vec<Edge>,
    /// Dual accumulators by edge id.
    pub z: Vec<f64>,
    /// Rooted walks destroyed so far, in scaled units.
    pub covered: f64,
    pub target_sigma: f64,
}

impl CoverState {
    pub fn cost(&self, graph: &Graph) -> f64 {
        self.picked
            .iter()
            .map(|e| graph.edge_cost(graph.edge_index(e.u, e.v).expect("picked edge")))
            .sum()
    }
}

/// Covers at least `sigma` rooted closed `k`-walks of `graph` (scaled by
/// `scale`). Edges with infinite cost are never picked and never raised.
pub fn primal_dual_cover(graph: &Graph, k: usize, costs: &[f64], sigma: f64, scale: f64) -> Result<CoverState> {
    if costs.len() != graph.edge_count() {
        return Err(Error::Invalid(format!("{} costs for {} edges", costs.len(), graph.edge_count())));
    }
    if k < 2 || k % 2 != 0 {
        return Err(Error::Invalid(format!("walk length must be even and at least 2, got {k}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Invalid(format!("cover target must be nonnegative, got {sigma}")));
    }
    let mut st = WalkState::new(Residual::new(graph), k, scale);
    cover_on(&mut st, costs, sigma)
}

fn cover_on(st: &mut WalkState, costs: &[f64], sigma: f64) -> Result<CoverState> {
    let cover = 2.0 * st.k as f64;
    let m = st.r.edge_count();
    let mut state = CoverState {
        picked: Vec::new(),
        z: vec![0.0; m],
        covered: 0.0,
        target_sigma: sigma,
    };
    if sigma <= 0.0 {
        return Ok(state);
    }
    let start = st.full_pass()?;
    while state.covered < sigma {
        let eligible: Vec<usize> = st
            .r
            .live_edges()
            .filter(|&id| costs[id].is_finite() && st.edge_val[id] > 0.0)
            .collect();
        let mut best: Option<(usize, f64)> = None;
        for &id in &eligible {
            let x = (costs[id] - state.z[id]).max(0.0) / (cover * st.edge_val[id]);
            if best.is_none_or(|(_, b)| x < b) {
                best = Some((id, x));
            }
        }
        let Some((pick, x)) = best else {
            return Err(Error::Unreachable {
                target: sigma,
                covered: state.covered,
                picked: state.picked.len(),
            });
        };
        for &id in &eligible {
            state.z[id] += x * cover * st.edge_val[id];
        }
        debug_assert!((state.z[pick] - costs[pick]).abs() <= 1e-6 * costs[pick].max(1.0));
        // Absorb rounding so the picked edge is exactly tight.
        state.z[pick] = costs[pick];
        st.remove_edge(pick);
        state.picked.push(st.r.edge(pick));
        let now = st.full_pass()?;
        state.covered = (start - now).max(state.covered);
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HitWalksMode {
    /// Every prefix of the cost-sorted edge list, plus the all-edges run.
    Full,
    /// A single primal-dual run with every edge eligible.
    FirstIteration,
}

/// Instance-size gate for [`HitWalksMode::Full`].
pub const FULL_MODE_EDGE_LIMIT: usize = 2000;

/// Partial cover of `σ = trace(Ãᵏ) − n` walks by primal-dual rounds.
pub fn hit_walks(graph: &Graph, cfg: &GreedyConfig, mode: HitWalksMode) -> Result<RemovalPlan> {
    hit_walks_with_limit(graph, cfg, mode, FULL_MODE_EDGE_LIMIT)
}

pub fn hit_walks_with_limit(graph: &Graph, cfg: &GreedyConfig, mode: HitWalksMode, edge_limit: usize) -> Result<RemovalPlan> {
    cfg.validate()?;
    let n = graph.present_node_count();
    let k = cfg.walk_length_for(n);
    let scale = cfg.scale.unwrap_or(cfg.threshold);
    let m = graph.edge_count();
    let costs = graph.edge_costs();

    let mut st = WalkState::new(Residual::new(graph), k, scale);
    let trace = st.full_pass()?;
    let sigma = (trace - n as f64).max(0.0);

    let picked: Vec<Edge> = if sigma == 0.0 {
        Vec::new()
    } else {
        match mode {
            HitWalksMode::FirstIteration => cover_on(&mut st, costs, sigma)?.picked,
            HitWalksMode::Full => {
                if m > edge_limit {
                    return Err(Error::SizeGuard(format!(
                        "full hit-walks runs one cover per edge; m = {m} exceeds {edge_limit}"
                    )));
                }
                full_mode(graph, k, scale, sigma, trace)?
            }
        }
    };

    let mut r = Residual::new(graph);
    let mut rec = Recorder::new(RemovalKind::EdgeRemoval, &r, cfg.power)?;
    for e in &picked {
        let id = graph.edge_index(e.u, e.v).expect("picked edge");
        r.remove_edge(id);
        rec.push(Item::Edge(*e), costs[id], &r)?;
    }
    rec.end_phase("hitwalks");
    Ok(rec.finish(true))
}

fn full_mode(graph: &Graph, k: usize, scale: f64, sigma: f64, trace: f64) -> Result<Vec<Edge>> {
    let m = graph.edge_count();
    let costs = graph.edge_costs();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));

    // Candidate 0: the unrestricted run.
    let mut st = WalkState::new(Residual::new(graph), k, scale);
    let base = cover_on(&mut st, costs, sigma)?;
    let mut best = (base.cost(graph), base.picked);

    let mut prefix = WalkState::new(Residual::new(graph), k, scale);
    let mut restricted = vec![f64::INFINITY; m];
    for &ej in &order {
        // Is the union of the first j edges' walks large enough?
        prefix.r.remove_edge(ej);
        prefix.bump();
        if trace - prefix.full_pass()? < sigma {
            restricted[ej] = costs[ej];
            continue;
        }
        let mut st = WalkState::new(Residual::new(graph), k, scale);
        st.r.remove_edge(ej);
        st.bump();
        let after = st.full_pass()?;
        let rest = sigma - (trace - after);
        let mut candidate = vec![graph.edge(ej)];
        let mut cost = costs[ej];
        if rest > 0.0 {
            match cover_on(&mut st, &restricted, rest) {
                Ok(c) => {
                    cost += c.picked.iter().map(|e| costs[graph.edge_index(e.u, e.v).unwrap()]).sum::<f64>();
                    candidate.extend(c.picked);
                }
                Err(Error::Unreachable { .. }) => {
                    restricted[ej] = costs[ej];
                    continue;
                }
                Err(e) => return Err(e),
            }
        }
        if cost < best.0 {
            best = (cost, candidate);
        }
        restricted[ej] = costs[ej];
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::walk_table_matrix;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
    }

    #[test]
    fn zero_target_picks_nothing() {
        let g = complete(4);
        let c = primal_dual_cover(&g, 4, g.edge_costs(), 0.0, 1.0).unwrap();
        assert!(c.picked.is_empty());
    }

    #[test]
    fn single_edge_covers_itself() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let total = walk_table_matrix(&g, 4, 1.0).unwrap().total_rooted;
        let c = primal_dual_cover(&g, 4, g.edge_costs(), total, 1.0).unwrap();
        assert_eq!(c.picked, vec![Edge::new(0, 1)]);
        assert!(c.covered >= total);
    }

    #[test]
    fn duals_stay_feasible_and_target_is_met() {
        let g = complete(4);
        let total = walk_table_matrix(&g, 4, 1.0).unwrap().total_rooted;
        let c = primal_dual_cover(&g, 4, g.edge_costs(), total / 2.0, 1.0).unwrap();
        assert!(c.covered >= total / 2.0);
        for id in 0..g.edge_count() {
            assert!(c.z[id] <= g.edge_cost(id) + 1e-9);
        }
        // Dropping half of K4's 4-walks takes more than one edge.
        assert!(c.picked.len() >= 2);
    }

    #[test]
    fn unreachable_targets_are_reported() {
        let g = complete(3);
        let err = primal_dual_cover(&g, 2, &[1.0, f64::INFINITY, f64::INFINITY], 5.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Unreachable { picked: 1, .. }));
    }

    #[test]
    fn below_threshold_gives_empty_plan() {
        let g = complete(3);
        for mode in [HitWalksMode::Full, HitWalksMode::FirstIteration] {
            assert!(hit_walks(&g, &GreedyConfig::new(2.5), mode).unwrap().is_empty());
        }
    }

    #[test]
    fn full_mode_is_no_worse_than_one_run() {
        let mut edges: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        edges.extend((4..8).flat_map(|a| (a + 1..8).map(move |b| (a, b))));
        let g = Graph::from_edges(8, edges).unwrap();
        let cfg = GreedyConfig::new(2.2).with_k(6);
        let full = hit_walks(&g, &cfg, HitWalksMode::Full).unwrap();
        let first = hit_walks(&g, &cfg, HitWalksMode::FirstIteration).unwrap();
        assert!(full.total_cost() <= first.total_cost());
        assert!(!first.is_empty());
    }

    #[test]
    fn full_mode_respects_size_gate() {
        let g = complete(5);
        let err = hit_walks_with_limit(&g, &GreedyConfig::new(1.0), HitWalksMode::Full, 3).unwrap_err();
        assert!(matches!(err, Error::SizeGuard(_)));
    }
}
