//! Property suites behind `validate`.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use immunet::generate::{barabasi_albert, erdos_renyi, random_rates};
use immunet::spectral::{enumerate_closed_walks, power_iteration, walk_count_dp, walk_table_matrix};
use immunet::{
    brute_force_srm, eigen_score_plan_with, greedy_walk_edges, greedy_walk_sparse, hybrid_plan, line_pagerank_plan_with,
    make_adversarial, product_degree_plan_with, sis_simulate, sis_simulate_nonuniform, transmission_radius, Edge, Graph,
    GreedyConfig, RemovalKind, Scoring, Stop, TransmissionMatrix,
};

use crate::output::sig12;
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Oracles,
    SpectralBounds,
    Adversarial,
    SisThreshold,
    PruningBounds,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Adversarial instance parameter; default checks 3, 4 and 5.
    #[arg(long = "Tprime", value_name = "T'")]
    pub t_prime: Option<usize>,
    /// Adversarial spine length; defaults to 3·T'.
    #[arg(long)]
    pub q: Option<usize>,
    /// Number of random instances.
    #[arg(long)]
    pub count: Option<usize>,
    /// Monte-Carlo runs per configuration.
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// With `--plan`, spot-check a `run` CSV against this graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub plan: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Default)]
struct Report {
    checks: Vec<Check>,
    counterexample: Option<Value>,
}

impl Report {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>, witness: impl FnOnce() -> Value) {
        if !passed && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn edges_json(g: &Graph) -> Value {
    json!(g.edges().iter().map(|e| [e.u, e.v]).collect::<Vec<_>>())
}

fn lambda(g: &Graph) -> Result<f64, Failure> {
    Ok(power_iteration(g, 1e-9, None, 0)?.lambda1)
}

/// Deterministic small G(n, p) for instance `i`.
fn small_random(seed: u64, i: u64, n_lo: usize, n_span: usize, p_lo: f64, p_span: f64) -> Result<Graph, Failure> {
    let mix = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i);
    let n = n_lo + (mix % n_span as u64) as usize;
    let p = p_lo + p_span * ((mix.wrapping_mul(7919) % 101) as f64 / 100.0);
    Ok(erdos_renyi(n, p, mix)?)
}

fn oracles(o: &Options, rep: &mut Report) -> Result<(), Failure> {
    let count = o.count.unwrap_or(50) as u64;
    let mut mismatches = 0;
    for i in 0..count {
        let g = small_random(o.seed, i, 6, 7, 0.3, 0.3)?;
        if g.edge_count() == 0 {
            continue;
        }
        for k in [2, 4, 6, 8] {
            let table = walk_table_matrix(&g, k, 1.0)?;
            let exact = enumerate_closed_walks(&g, k)?;
            let mut bad_edge = None;
            for (id, e) in g.edges().iter().enumerate() {
                if walk_count_dp(&g, e.u, e.v, k, 1.0)? != table.per_edge[id] {
                    bad_edge = Some(*e);
                    break;
                }
            }
            let ok = table.total_rooted == exact as f64 && bad_edge.is_none();
            if !ok {
                mismatches += 1;
                rep.check(
                    format!("walk counts, graph {i}, k {k}"),
                    false,
                    format!("trace {} vs enumerated {exact}", table.total_rooted),
                    || json!({"k": k, "edges": edges_json(&g), "nodes": g.node_count(), "edge": bad_edge.map(|e| [e.u, e.v])}),
                );
            }
        }
    }
    rep.check(
        "walk counts",
        mismatches == 0,
        format!("{count} graphs × k ∈ {{2,4,6,8}}: trace = enumeration and per-edge DP = table"),
        || Value::Null,
    );
    if let (Some(gp), Some(pp)) = (&o.graph, &o.plan) {
        plan_spot_check(gp, pp, rep)?;
    }
    Ok(())
}

/// Recomputes λ₁ for a sample of rows of a `run` CSV.
fn plan_spot_check(graph_path: &Path, plan_path: &Path, rep: &mut Report) -> Result<(), Failure> {
    let graph = crate::load_graph(graph_path, None)?;
    let text = std::fs::read_to_string(plan_path).map_err(|e| Failure::usage(format!("{}: {e}", plan_path.display())))?;
    let bad = |line: usize| Failure::usage(format!("{}: line {line}: not a plan row", plan_path.display()));
    let mut rows: Vec<(String, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(i + 1));
        }
        rows.push((f[1].to_string(), f[5].parse().map_err(|_| bad(i + 1))?));
    }
    if rows.is_empty() {
        return Err(Failure::usage(format!("{}: no rows", plan_path.display())));
    }
    let label = |s: &str| -> Result<usize, Failure> {
        let l: u64 = s.parse().map_err(|_| Failure::usage(format!("bad item `{s}`")))?;
        graph.node_by_label(l).ok_or_else(|| Failure::usage(format!("node {l} is not in the graph")))
    };
    let mut edges = Vec::new();
    let mut nodes = Vec::new();
    for (item, _) in rows.iter().skip(1) {
        match item.split_once('-') {
            Some((a, b)) => edges.push(Edge::new(label(a)?, label(b)?)),
            None => nodes.push(label(item)?),
        }
    }
    let steps = rows.len() - 1;
    let samples: Vec<usize> = if steps <= 20 { (0..=steps).collect() } else { (0..=20).map(|j| j * steps / 20).collect() };
    let mut worst: f64 = 0.0;
    for &s in &samples {
        let g = if nodes.is_empty() {
            graph.remove_edges(&edges[..s])?
        } else {
            graph.remove_nodes(&nodes[..s])?
        };
        let l = lambda(&g)?;
        let err = (l - rows[s].1).abs() / l.max(1.0);
        worst = worst.max(err);
        if err > 1e-7 {
            rep.check(format!("plan row {s}"), false, format!("λ₁ {} recomputed as {}", rows[s].1, sig12(l)), || {
                json!({"row": s, "recorded": rows[s].1, "recomputed": l})
            });
        }
    }
    rep.check(
        "plan λ₁ recomputable",
        worst <= 1e-7,
        format!("{} of {} rows, max relative error {worst:.1e}", samples.len(), steps + 1),
        || Value::Null,
    );
    Ok(())
}

fn spectral_bounds(o: &Options, rep: &mut Report) -> Result<(), Failure> {
    let count = o.count.unwrap_or(10) as u64;
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let seed = o.seed.wrapping_add(i);
        let n = 30 + (i as usize * 90) / count.max(1) as usize;
        let g = if i % 2 == 0 { erdos_renyi(n, 6.0 / n as f64, seed)? } else { barabasi_albert(n, 2, seed)? };
        let l0 = lambda(&g)?;
        let d = g.max_degree() as f64;
        let mean = 2.0 * g.edge_count() as f64 / g.present_node_count() as f64;
        let classical = l0 >= d.sqrt() - 1e-9 && l0 >= mean - 1e-9 && l0 <= d + 1e-9;
        rep.check(format!("graph {i}: √Δ, mean degree ≤ λ₁ ≤ Δ"), classical, format!("λ₁ {}", sig12(l0)), || {
            json!({"edges": edges_json(&g), "nodes": n, "lambda1": l0})
        });
        let t = 0.5 * l0;
        let mut cfg = GreedyConfig::new(t);
        cfg.epsilon = o.epsilon;
        cfg.k_cap = usize::MAX;
        let plan = greedy_walk_edges(&g, &cfg)?;
        let l = lambda(&plan.apply(&g)?)?;
        worst = worst.max(l / t);
        rep.check(
            format!("graph {i}: residual λ₁ ≤ (1+ε)T"),
            l <= (1.0 + o.epsilon) * t,
            format!("n {n}, k {}, λ₁/T {}", cfg.walk_length_for(n), sig12(l / t)),
            || json!({"edges": edges_json(&g), "nodes": n, "T": t, "residual_lambda1": l}),
        );
    }
    log::info!("spectral-bounds: worst λ₁/T {worst}");
    Ok(())
}

fn adversarial(o: &Options, rep: &mut Report) -> Result<(), Failure> {
    let values = o.t_prime.map_or(vec![3, 4, 5], |t| vec![t]);
    for tp in values {
        let q = o.q.unwrap_or(3 * tp);
        let inst = make_adversarial(tp, q)?;
        let g = &inst.graph;
        let t = tp as f64;
        let limit = 2 * tp + 3 + (tp + 1) * (tp + 1) - (tp * tp + 1);
        let lw = lambda(&g.remove_edges(&inst.witness_edges)?)?;
        rep.check(
            format!("T' {tp}: witness"),
            lw < t && inst.witness_edges.len() <= limit,
            format!("{} edges (limit {limit}) leave λ₁ {}", inst.witness_edges.len(), sig12(lw)),
            || json!({"t_prime": tp, "q": q, "witness": inst.witness_edges, "lambda1": lw}),
        );
        let stop = Stop::Threshold(t);
        let plans = [
            ("ProductDegree", product_degree_plan_with(g, stop, Scoring::Static)?),
            ("EigenScore", eigen_score_plan_with(g, stop, Scoring::Static)?),
            ("LinePagerank", line_pagerank_plan_with(g, stop, Scoring::Static)?),
            ("Hybrid", hybrid_plan(g, stop)?),
        ];
        for (name, p) in plans {
            rep.check(
                format!("T' {tp}: {name} removes ≥ q = {q}"),
                p.len() >= q,
                format!("{} removals, witness {}", p.len(), inst.witness_edges.len()),
                || json!({"t_prime": tp, "q": q, "heuristic": name, "removed": p.edges()}),
            );
        }
    }
    Ok(())
}

fn sis_threshold(o: &Options, rep: &mut Report) -> Result<(), Failure> {
    let runs = o.runs.unwrap_or(200);
    let n = 200;
    let g = erdos_renyi(n, 8.0 / n as f64, o.seed)?;
    let l = lambda(&g)?;
    let all: Vec<usize> = (0..n).collect();
    let horizon = 400.0;
    let sub = sis_simulate(&g, 0.8 / l, 1.0, &all, horizon, runs, o.seed.wrapping_add(1))?;
    let sup = sis_simulate(&g, 1.5 / l, 1.0, &all, horizon, runs, o.seed.wrapping_add(2))?;
    rep.check(
        "median extinction: λ₁ = 0.8T vs 1.5T",
        sub.median() <= 0.2 * sup.median(),
        format!("{} vs {} ({runs} runs each)", sig12(sub.median()), sig12(sup.median())),
        || json!({"edges": edges_json(&g), "nodes": n, "lambda1": l, "medians": [sub.median(), sup.median()]}),
    );
    for i in 0..5u64 {
        let g = small_random(o.seed, 100 + i, 15, 10, 0.15, 0.15)?;
        if g.edge_count() == 0 {
            continue;
        }
        let raw = random_rates(&g, 0.1, 1.0, 1.0, o.seed.wrapping_add(i))?;
        let rho = transmission_radius(&g, &raw)?;
        let rates = TransmissionMatrix::from_rates(&g, raw.rates().iter().map(|b| b * 0.6 / rho).collect(), 1.0)?;
        let rho = transmission_radius(&g, &rates)?;
        let bound = 3.0 * ((g.node_count() as f64).ln() + 1.0) / (1.0 - rho);
        let all: Vec<usize> = (0..g.node_count()).collect();
        let out = sis_simulate_nonuniform(&g, &rates, &all, 100.0 * bound, runs, o.seed.wrapping_add(10 + i))?;
        rep.check(
            format!("non-uniform graph {i}: mean extinction ≤ 3(ln n + 1)/(δ − ρ(B))"),
            out.censored == 0 && out.mean() <= bound,
            format!("mean {} bound {}", sig12(out.mean()), sig12(bound)),
            || json!({"edges": edges_json(&g), "rates": rates.rates(), "mean": out.mean(), "bound": bound}),
        );
    }
    Ok(())
}

fn pruning_bounds(o: &Options, rep: &mut Report) -> Result<(), Failure> {
    let count = o.count.unwrap_or(30) as u64;
    let mut i = 0u64;
    let mut done = 0;
    while done < count {
        let g = small_random(o.seed, 1000 + i, 4, 4, 0.4, 0.4)?;
        i += 1;
        if g.edge_count() == 0 || g.edge_count() > immunet::validation::BRUTE_MAX_EDGES {
            continue;
        }
        done += 1;
        let t = 0.6 * lambda(&g)?;
        let opt = brute_force_srm(&g, t, RemovalKind::EdgeRemoval, None)?.cost;
        let mut cfg = GreedyConfig::new(t);
        cfg.epsilon = o.epsilon;
        let plan = greedy_walk_sparse(&g, &cfg)?;
        let (p1, p2) = (plan.phases[0].len, plan.phases[1].len);
        let upto = |s: usize| if s == 0 { 0.0 } else { plan.cumulative_cost[s - 1] };
        let (c1, c2) = (upto(p1), upto(p1 + p2) - upto(p1));
        let l = lambda(&plan.apply(&g)?)?;
        rep.check(
            format!("instance {done}"),
            c1 <= 2.0 * opt && c2 <= 2.0 * opt && l <= (1.0 + o.epsilon) * t,
            format!("c(E1) {c1}, c(E2) {c2}, OPT {opt}, λ₁/T {}", sig12(l / t)),
            || json!({"edges": edges_json(&g), "nodes": g.node_count(), "T": t, "opt": opt, "c1": c1, "c2": c2}),
        );
    }
    Ok(())
}

pub fn cmd_validate(suite: Suite, opts: &Options, out: Option<&Path>) -> Result<(), Failure> {
    let mut rep = Report::default();
    match suite {
        Suite::Oracles => oracles(opts, &mut rep)?,
        Suite::SpectralBounds => spectral_bounds(opts, &mut rep)?,
        Suite::Adversarial => adversarial(opts, &mut rep)?,
        Suite::SisThreshold => sis_threshold(opts, &mut rep)?,
        Suite::PruningBounds => pruning_bounds(opts, &mut rep)?,
    }
    for c in &rep.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let passed = rep.passed();
    if let Some(p) = out {
        let report = json!({
            "suite": suite,
            "passed": passed,
            "checks": rep.checks,
            "counterexample": rep.counterexample,
        });
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(p, text + "\n").map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
    }
    if passed {
        Ok(())
    } else {
        let first = rep.checks.iter().find(|c| !c.passed).expect("a check failed");
        let witness = rep.counterexample.unwrap_or(Value::Null);
        Err(Failure::property(format!("{}: {}\ncounterexample: {witness}", first.name, first.detail)))
    }
}
