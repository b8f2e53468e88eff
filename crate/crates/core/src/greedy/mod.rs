//! Greedy walk-hitting removal: pick the item that destroys the most closed
//! `k`-walks per unit cost until few enough remain.
//!
//! Scores are in rooted units of `Ã = A/s`: an edge covers at most
//! `2k·Ã^{k-1}_{uv}` rooted closed walks (a walk can cross the edge at any of
//! `k` positions in either direction), a node at most `k·Ãᵏ_{vv}`. The amount
//! still to destroy is `r = trace(Ãᵏ) − n`, and the score of an item is
//! `min(r, coverage)/cost`. Items whose clamped scores tie are ordered by
//! unclamped `coverage/cost`, then by the smaller edge or node.

mod config;
mod engine;

use std::collections::BinaryHeap;

pub use config::{auto_walk_length, Backend, GreedyConfig, StopRule, WalkLength};
pub(crate) use engine::{argmax, Entry, WalkState};


use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::plan::{Item, Recorder, RemovalKind, RemovalPlan};
use crate::rates::TransmissionMatrix;
use crate::residual::Residual;
use crate::spectral::walks::BLOCK;

/// Everything the edge loop needs besides the residual itself.
pub(crate) struct EdgeRun<'a> {
    pub costs: &'a [f64],
    pub n: f64,
    pub threshold: f64,
    pub k: usize,
    pub scale: f64,
    pub lazy: bool,
    pub stop_rule: StopRule,
    pub max_removals: Option<usize>,
    pub uniform_costs: bool,
}

fn edge_setup(graph: &Graph, cfg: &GreedyConfig) -> Result<(usize, f64, bool)> {
    cfg.validate()?;
    let n = graph.present_node_count();
    let k = cfg.walk_length_for(n);
    let scale = cfg.scale.unwrap_or(cfg.threshold);
    Ok((k, scale, cfg.lazy(n, graph.edge_count())))
}

/// Greedy edge removal with the backend chosen by the configuration.
pub fn greedy_walk_edges(graph: &Graph, cfg: &GreedyConfig) -> Result<RemovalPlan> {
    let (k, scale, lazy) = edge_setup(graph, cfg)?;
    let mut rec = Recorder::new(RemovalKind::EdgeRemoval, &Residual::new(graph), cfg.power)?;
    let run = EdgeRun {
        costs: graph.edge_costs(),
        n: graph.present_node_count() as f64,
        threshold: cfg.threshold,
        k,
        scale,
        lazy,
        stop_rule: cfg.stop_rule,
        max_removals: cfg.max_removals,
        uniform_costs: uniform(graph.edge_costs()),
    };
    let done = run_edges(&run, Residual::new(graph), &mut rec)?;
    rec.end_phase("greedy");
    Ok(rec.finish(done))
}

/// Greedy edge removal with lazy re-evaluation forced on.
pub fn greedy_edge_choice_lazy(graph: &Graph, cfg: &GreedyConfig) -> Result<RemovalPlan> {
    greedy_walk_edges(graph, &cfg.clone().with_backend(Backend::DpLazy))
}

/// Greedy edge removal on the rate matrix `B`, with the recovery rate `δ`
/// taking the place of the threshold and of the scale.
pub fn greedy_walk_nonuniform(graph: &Graph, rates: &TransmissionMatrix, cfg: &GreedyConfig) -> Result<RemovalPlan> {
    if rates.rates().len() != graph.edge_count() {
        return Err(Error::Invalid("rate matrix does not match the graph".into()));
    }
    let delta = rates.recovery();
    let mut cfg = cfg.clone();
    cfg.threshold = delta;
    cfg.scale = Some(delta);
    let (k, scale, lazy) = edge_setup(graph, &cfg)?;
    let r = Residual::weighted(graph, rates);
    let mut rec = Recorder::new(RemovalKind::EdgeRemoval, &r, cfg.power)?;
    let run = EdgeRun {
        costs: graph.edge_costs(),
        n: graph.present_node_count() as f64,
        threshold: delta,
        k,
        scale,
        lazy,
        stop_rule: cfg.stop_rule,
        max_removals: cfg.max_removals,
        uniform_costs: uniform(graph.edge_costs()),
    };
    let done = run_edges(&run, r, &mut rec)?;
    rec.end_phase("greedy");
    Ok(rec.finish(done))
}

pub(crate) fn uniform(costs: &[f64]) -> bool {
    costs.windows(2).all(|w| w[0] == w[1])
}

/// The greedy loop over edges. Returns whether the stopping condition was met.
pub(crate) fn run_edges(run: &EdgeRun, r: Residual, rec: &mut Recorder) -> Result<bool> {
    let mut st = WalkState::new(r, run.k, run.scale);
    let mut heap = BinaryHeap::new();
    let mut removed = 0usize;
    if run.lazy {
        st.full_pass()?;
        rebuild_edge_heap(&st, run, &mut heap);
    }
    loop {
        let mut touched = 0;
        let (go, exact) = match run.stop_rule {
            StopRule::LambdaDirect => (rec.lambda() >= run.threshold, None),
            StopRule::RootedTrace if run.lazy => {
                let mut refreshed = Vec::new();
                let out = st.trace_at_least(run.n, rec.lambda(), &mut refreshed)?;
                touched = refreshed.len();
                for a in refreshed {
                    for (&b, &id) in st.r.neighbors(a).iter().zip(st.r.incident_edges(a)) {
                        let id = id as usize;
                        if b as usize > a {
                            heap.push(Entry {
                                score: 2.0 * run.k as f64 * st.edge_val[id] / run.costs[id],
                                id,
                                version: st.version,
                            });
                        }
                    }
                }
                out
            }
            StopRule::RootedTrace => {
                let t = st.full_pass()?;
                (t >= run.n, Some(t))
            }
        };
        if !go {
            return Ok(true);
        }
        if run.max_removals.is_some_and(|b| removed >= b) || st.r.live_edge_count() == 0 {
            return Ok(false);
        }
        let pick = if run.lazy {
            let budget = (st.r.live_nodes().filter(|&v| st.r.degree(v) > 0).count() / 2).saturating_sub(touched);
            lazy_edge_pick(&mut st, run, &mut heap, exact, rec.lambda(), budget.max(1))?
        } else {
            let t = match exact {
                Some(t) => t,
                None => st.full_pass()?,
            };
            eager_edge_pick(&st, run, t)
        };
        let Some(id) = pick else {
            // Nothing left with positive coverage.
            return Ok(false);
        };
        st.remove_edge(id);
        removed += 1;
        rec.push(Item::Edge(st.r.edge(id)), run.costs[id], &st.r)?;
    }
}

fn clamp_room(run: &EdgeRun, trace: f64) -> f64 {
    match run.stop_rule {
        StopRule::RootedTrace => trace - run.n,
        StopRule::LambdaDirect => f64::INFINITY,
    }
}

fn eager_edge_pick(st: &WalkState, run: &EdgeRun, trace: f64) -> Option<usize> {
    let cover = 2.0 * run.k as f64;
    let room = clamp_room(run, trace);
    argmax(
        st.r
            .live_edges()
            .map(|id| {
                let c = cover * st.edge_val[id];
                (id, c.min(room) / run.costs[id], c / run.costs[id])
            }),
    )
}

fn rebuild_edge_heap(st: &WalkState, run: &EdgeRun, heap: &mut BinaryHeap<Entry>) {
    let cover = 2.0 * run.k as f64;
    heap.clear();
    for id in st.r.live_edges() {
        heap.push(Entry {
            score: cover * st.edge_val[id] / run.costs[id],
            id,
            version: st.edge_ver[id],
        });
    }
}

fn lazy_edge_pick(
    st: &mut WalkState,
    run: &EdgeRun,
    heap: &mut BinaryHeap<Entry>,
    exact: Option<f64>,
    lambda: f64,
    mut budget: usize,
) -> Result<Option<usize>> {
    let cover = 2.0 * run.k as f64;
    let mut batch: Vec<usize> = Vec::with_capacity(BLOCK);
    loop {
        let top = heap.pop();
        let settled = match top {
            Some(t) if !st.r.is_edge_alive(t.id) || st.edge_ver[t.id] != t.version => continue,
            Some(t) => st.edge_fresh(t.id).then_some(t),
            None => None,
        };
        if let (Some(t), false) = (settled, batch.is_empty()) {
            // Refresh what was collected before judging this entry.
            heap.push(t);
        } else if let Some(top) = settled {
            if run.stop_rule == StopRule::RootedTrace && !run.uniform_costs {
                // With unequal costs the clamp min(r, ·) may reorder
                // candidates once coverage reaches r; settle those rounds
                // with an exact pass.
                let room = match exact {
                    Some(t) => t - run.n,
                    None => (lambda / run.scale).powi(run.k as i32) - run.n,
                };
                if cover * st.edge_val[top.id] >= room * (1.0 - 1e-9) {
                    // An exact trace means every chain was just refreshed.
                    let t = match exact {
                        Some(t) => t,
                        None => st.full_pass()?,
                    };
                    let pick = eager_edge_pick(st, run, t);
                    rebuild_edge_heap(st, run, heap);
                    return Ok(pick);
                }
            }
            if top.score <= 0.0 {
                return Ok(None);
            }
            return Ok(Some(top.id));
        } else if let Some(t) = top {
            let source = st.r.edge(t.id).u;
            if !batch.contains(&source) {
                batch.push(source);
            }
            if batch.len() < BLOCK {
                continue;
            }
        }
        if batch.is_empty() {
            return Ok(None);
        }
        if batch.len() >= budget {
            // Most chains are stale anyway: refresh them all in full blocks.
            st.refresh_stale()?;
            rebuild_edge_heap(st, run, heap);
            batch.clear();
            budget = usize::MAX;
            continue;
        }
        budget -= batch.len();
        let version = st.version;
        st.refresh(&batch, |id, x| {
            heap.push(Entry {
                score: cover * x / run.costs[id],
                id,
                version,
            })
        })?;
        batch.clear();
    }
}

/// Greedy node removal.
pub fn greedy_walk_nodes(graph: &Graph, cfg: &GreedyConfig) -> Result<RemovalPlan> {
    cfg.validate()?;
    let n = graph.present_node_count();
    let k = cfg.walk_length_for(n);
    let scale = cfg.scale.unwrap_or(cfg.threshold);
    let lazy = cfg.lazy(n, graph.edge_count());
    let nf = n as f64;
    let cover = k as f64;
    let costs = graph.node_costs();
    let mut st = WalkState::new(Residual::new(graph), k, scale);
    let mut rec = Recorder::new(RemovalKind::NodeRemoval, &st.r, cfg.power)?;
    let mut heap = BinaryHeap::new();
    let rebuild = |st: &WalkState, heap: &mut BinaryHeap<Entry>| {
        heap.clear();
        for v in st.r.live_nodes().filter(|&v| st.r.degree(v) > 0) {
            heap.push(Entry {
                score: cover * st.node_val[v] / costs[v],
                id: v,
                version: st.node_ver[v],
            });
        }
    };
    let eager = |st: &WalkState, trace: f64| {
        let room = match cfg.stop_rule {
            StopRule::RootedTrace => trace - nf,
            StopRule::LambdaDirect => f64::INFINITY,
        };
        argmax(
            st.r
                .live_nodes()
                .filter(|&v| st.r.degree(v) > 0)
                .map(|v| {
                    let c = cover * st.node_val[v];
                    (v, c.min(room) / costs[v], c / costs[v])
                }),
        )
    };
    if lazy {
        st.full_pass()?;
        rebuild(&st, &mut heap);
    }
    let mut removed = 0usize;
    let done = loop {
        let (go, exact) = match cfg.stop_rule {
            StopRule::LambdaDirect => (rec.lambda() >= cfg.threshold, None),
            StopRule::RootedTrace if lazy => {
                let mut refreshed = Vec::new();
                let out = st.trace_at_least(nf, rec.lambda(), &mut refreshed)?;
                for v in refreshed {
                    heap.push(Entry {
                        score: cover * st.node_val[v] / costs[v],
                        id: v,
                        version: st.version,
                    });
                }
                out
            }
            StopRule::RootedTrace => {
                let t = st.full_pass()?;
                (t >= nf, Some(t))
            }
        };
        if !go {
            break true;
        }
        if cfg.max_removals.is_some_and(|b| removed >= b) || st.r.live_edge_count() == 0 {
            break false;
        }
        let pick = if !lazy {
            let t = match exact {
                Some(t) => t,
                None => st.full_pass()?,
            };
            eager(&st, t)
        } else {
            let mut pick = None;
            while let Some(top) = heap.pop() {
                let v = top.id;
                if !st.r.is_node_alive(v) || st.r.degree(v) == 0 || st.node_ver[v] != top.version {
                    continue;
                }
                if st.node_fresh(v) {
                    if cfg.stop_rule == StopRule::RootedTrace && !uniform(costs) {
                        let room = match exact {
                            Some(t) => t - nf,
                            None => (rec.lambda() / scale).powi(k as i32) - nf,
                        };
                        if cover * st.node_val[v] >= room * (1.0 - 1e-9) {
                            let t = st.full_pass()?;
                            pick = eager(&st, t);
                            rebuild(&st, &mut heap);
                            break;
                        }
                    }
                    pick = Some(v);
                    break;
                }
                st.refresh(&[v], |_, _| {})?;
                heap.push(Entry {
                    score: cover * st.node_val[v] / costs[v],
                    id: v,
                    version: st.version,
                });
            }
            pick
        };
        let Some(v) = pick else { break false };
        st.remove_node(v);
        removed += 1;
        rec.push(Item::Node(v), costs[v], &st.r)?;
    };
    rec.end_phase("greedy");
    Ok(rec.finish(done))
}
