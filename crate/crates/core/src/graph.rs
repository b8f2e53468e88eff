//! Undirected simple graphs with per-edge and per-node removal costs.
//!
//! A [`Graph`] is immutable once built. Removal operations return a new graph
//! that keeps the node index space of the original, so node ids and edge
//! endpoints stay meaningful across a sequence of removals.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected edge stored with `u < v`.
///
/// The derived ordering is (min endpoint, max endpoint), which is also the
/// order edges are indexed in a [`Graph`] and the tie-break order used by
/// every removal algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Builds the canonical form of `{a, b}`. Panics on a self-loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert!(a != b, "self-loop ({a}, {a}) is not an edge");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// How the optional third column of an edge-list file is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostMode {
    /// Every edge costs 1; a third column is ignored.
    #[default]
    Unit,
    /// The third column, when present, is the edge cost.
    Column,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    present: Vec<bool>,
    edges: Vec<Edge>,
    edge_cost: Vec<f64>,
    node_cost: Vec<f64>,
    offsets: Vec<usize>,
    adj: Vec<usize>,
    adj_edge: Vec<usize>,
    labels: Option<Vec<u64>>,
}

/// Result of [`load_edge_list`]: the graph plus the cleanup it needed.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub duplicates: usize,
    pub self_loops: usize,
}

fn check_cost(c: f64, what: &str) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{what} cost must be positive and finite, got {c}")))
    }
}

impl Graph {
    /// Graph on nodes `0..n` with unit costs.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_weighted_edges(n, edges.into_iter().map(|(a, b)| (a, b, 1.0)))
    }

    /// Graph on nodes `0..n` with the given edge costs and unit node costs.
    pub fn from_weighted_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b, c) in edges {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::Invalid(format!("self-loop at node {a}")));
            }
            check_cost(c, "edge")?;
            list.push((Edge::new(a, b), c));
        }
        list.sort_by(|x, y| x.0.cmp(&y.0));
        if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Invalid(format!("parallel edge {}", w[0].0)));
        }
        Ok(Self::build(n, vec![true; n], list, vec![1.0; n], None))
    }

    fn build(
        n: usize,
        present: Vec<bool>,
        list: Vec<(Edge, f64)>,
        node_cost: Vec<f64>,
        labels: Option<Vec<u64>>,
    ) -> Self {
        debug_assert!(list.windows(2).all(|w| w[0].0 < w[1].0));
        let mut deg = vec![0usize; n];
        for (e, _) in &list {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adj = vec![0; offsets[n]];
        let mut adj_edge = vec![0; offsets[n]];
        // Edges are sorted, so each neighbour list comes out sorted: for node x the
        // edges (a, x) with a < x precede every (x, b).
        for (id, (e, _)) in list.iter().enumerate() {
            adj[fill[e.u]] = e.v;
            adj_edge[fill[e.u]] = id;
            fill[e.u] += 1;
            adj[fill[e.v]] = e.u;
            adj_edge[fill[e.v]] = id;
            fill[e.v] += 1;
        }
        let (edges, edge_cost) = list.into_iter().unzip();
        Graph {
            n,
            present,
            edges,
            edge_cost,
            node_cost,
            offsets,
            adj,
            adj_edge,
            labels,
        }
    }

    /// Replaces the edge costs (indexed by edge id).
    pub fn with_edge_costs(self, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != self.edges.len() {
            return Err(Error::Invalid(format!(
                "{} edge costs given for {} edges",
                costs.len(),
                self.edges.len()
            )));
        }
        for &c in &costs {
            check_cost(c, "edge")?;
        }
        Ok(Graph { edge_cost: costs, ..self })
    }

    /// Replaces the node costs (indexed by node id).
    pub fn with_node_costs(self, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != self.n {
            return Err(Error::Invalid(format!("{} node costs given for {} nodes", costs.len(), self.n)));
        }
        for &c in &costs {
            check_cost(c, "node")?;
        }
        Ok(Graph { node_cost: costs, ..self })
    }

    /// Size of the node index space, including removed nodes.
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn present_node_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_present(&self, v: usize) -> bool {
        v < self.n && self.present[v]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn edge_cost(&self, id: usize) -> f64 {
        self.edge_cost[id]
    }

    pub fn edge_costs(&self) -> &[f64] {
        &self.edge_cost
    }

    pub fn node_cost(&self, v: usize) -> f64 {
        self.node_cost[v]
    }

    pub fn node_costs(&self) -> &[f64] {
        &self.node_cost
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(neighbour, edge id)` pairs for `v`, sorted by neighbour.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.adj[r.clone()].iter().copied().zip(self.adj_edge[r].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.n || b >= self.n || a == b {
            return None;
        }
        let (x, y) = if self.degree(a) <= self.degree(b) { (a, b) } else { (b, a) };
        let nb = self.neighbors(x);
        nb.binary_search(&y).ok().map(|i| self.adj_edge[self.offsets[x] + i])
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    /// Original ids from the loaded file, when the graph came from one.
    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    /// External id of node `v` (its file id if loaded, otherwise `v`).
    pub fn label(&self, v: usize) -> u64 {
        self.labels.as_ref().map_or(v as u64, |l| l[v])
    }

    /// Looks up the node index for an external id.
    pub fn node_by_label(&self, label: u64) -> Option<usize> {
        match &self.labels {
            Some(l) => l.binary_search(&label).ok(),
            None => usize::try_from(label).ok().filter(|&v| v < self.n),
        }
    }

    pub fn total_edge_cost(&self) -> f64 {
        self.edge_cost.iter().sum()
    }

    /// `G[E \ removed]`. Node set and surviving costs are unchanged.
    pub fn remove_edges(&self, removed: &[Edge]) -> Result<Graph> {
        let mut drop = vec![false; self.edges.len()];
        for e in removed {
            let id = self.edge_index(e.u, e.v).ok_or(Error::UnknownEdge(*e))?;
            drop[id] = true;
        }
        let list = self
            .edges
            .iter()
            .zip(&self.edge_cost)
            .zip(&drop)
            .filter(|(_, &d)| !d)
            .map(|((&e, &c), _)| (e, c))
            .collect();
        Ok(Self::build(
            self.n,
            self.present.clone(),
            list,
            self.node_cost.clone(),
            self.labels.clone(),
        ))
    }

    /// Removes nodes and their incident edges. Indices of surviving nodes are
    /// preserved; removed nodes stay in the index space as absent.
    pub fn remove_nodes(&self, removed: &[usize]) -> Result<Graph> {
        let mut present = self.present.clone();
        for &v in removed {
            if !self.is_present(v) {
                return Err(Error::UnknownNode(v));
            }
            present[v] = false;
        }
        let list = self
            .edges
            .iter()
            .zip(&self.edge_cost)
            .filter(|(e, _)| present[e.u] && present[e.v])
            .map(|(&e, &c)| (e, c))
            .collect();
        Ok(Self::build(
            self.n,
            present,
            list,
            self.node_cost.clone(),
            self.labels.clone(),
        ))
    }

    /// Line graph: node `i` stands for edge `i`; two nodes are adjacent when
    /// their edges share an endpoint. Unit costs.
    pub fn line_graph(&self) -> Result<Graph> {
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        let mut pairs = Vec::new();
        for v in 0..self.n {
            let inc = &self.adj_edge[self.offsets[v]..self.offsets[v + 1]];
            for (i, &a) in inc.iter().enumerate() {
                for &b in &inc[i + 1..] {
                    pairs.push((Edge::new(a, b), 1.0));
                }
            }
        }
        // Two distinct edges share at most one endpoint in a simple graph, so
        // no pair is produced twice.
        pairs.sort_by(|x, y| x.0.cmp(&y.0));
        let m = self.edges.len();
        Ok(Self::build(m, vec![true; m], pairs, vec![1.0; m], None))
    }

    /// Nodes of the maximal induced subgraph with minimum degree `t`, found by
    /// repeatedly peeling nodes of degree below `t`. Sorted ascending.
    pub fn k_core(&self, t: usize) -> Vec<usize> {
        let mut deg = self.degrees();
        let mut alive = self.present.clone();
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| alive[v] && deg[v] < t).collect();
        for &v in &queue {
            alive[v] = false;
        }
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if alive[w] {
                    deg[w] -= 1;
                    if deg[w] < t {
                        alive[w] = false;
                        queue.push_back(w);
                    }
                }
            }
        }
        (0..self.n).filter(|&v| alive[v]).collect()
    }

    /// Edge ids with both endpoints in `nodes` (a membership mask).
    pub fn induced_edges(&self, mask: &[bool]) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&id| mask[self.edges[id].u] && mask[self.edges[id].v])
            .collect()
    }

    /// Deterministic edge-list text: `u v cost`, sorted by (min, max) endpoint,
    /// using external ids. Costs use the shortest exact decimal form.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes {} edges {}", self.present_node_count(), self.edges.len());
        for (e, c) in self.edges.iter().zip(&self.edge_cost) {
            let _ = writeln!(out, "{} {} {}", self.label(e.u), self.label(e.v), c);
        }
        out
    }

    pub(crate) fn present_mask(&self) -> &[bool] {
        &self.present
    }
}

/// Reads a whitespace-separated edge list (`u v [cost]`, `#` comments, LF or
/// CRLF). Node ids are compacted to `0..n` in ascending id order; the
/// original ids are kept as labels.
pub fn load_edge_list<R: BufRead>(reader: R, mode: CostMode) -> Result<LoadedGraph> {
    let mut raw: Vec<(u64, u64, f64)> = Vec::new();
    let mut self_loops = 0;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `u v [cost]`, got {} fields", fields.len()),
            });
        }
        let id = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad node id `{s}`"),
            })
        };
        let (a, b) = (id(fields[0])?, id(fields[1])?);
        let cost = match (mode, fields.get(2)) {
            (CostMode::Column, Some(s)) => {
                let c: f64 = s.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad cost `{s}`"),
                })?;
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::Invalid(format!("line {lineno}: cost {c} is not positive")));
                }
                c
            }
            _ => 1.0,
        };
        if a == b {
            self_loops += 1;
            continue;
        }
        raw.push((a, b, cost));
    }
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loops");
    }

    let mut labels: Vec<u64> = raw.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    labels.sort_unstable();
    labels.dedup();
    let index = |x: u64| labels.binary_search(&x).unwrap();

    let mut best: HashMap<Edge, f64> = HashMap::with_capacity(raw.len());
    let mut duplicates = 0;
    for &(a, b, c) in &raw {
        let e = Edge::new(index(a), index(b));
        best.entry(e)
            .and_modify(|old| {
                duplicates += 1;
                if c < *old {
                    *old = c;
                }
            })
            .or_insert(c);
    }
    if duplicates > 0 {
        log::warn!("collapsed {duplicates} duplicate edges (kept minimum cost)");
    }
    let mut list: Vec<(Edge, f64)> = best.into_iter().collect();
    list.sort_by(|x, y| x.0.cmp(&y.0));
    let n = labels.len();
    let graph = Graph::build(n, vec![true; n], list, vec![1.0; n], Some(labels));
    Ok(LoadedGraph {
        graph,
        duplicates,
        self_loops,
    })
}

/// Reads `v cost` lines (external ids) and returns the graph with those node
/// costs applied; unlisted nodes keep their current cost.
pub fn apply_node_costs<R: BufRead>(graph: Graph, reader: R) -> Result<Graph> {
    let mut costs = graph.node_costs().to_vec();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: "expected `v cost`".into(),
            });
        }
        let label: u64 = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad node id `{}`", fields[0]),
        })?;
        let c: f64 = fields[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad cost `{}`", fields[1]),
        })?;
        let v = graph.node_by_label(label).ok_or(Error::Parse {
            line: lineno,
            message: format!("unknown node {label}"),
        })?;
        costs[v] = c;
    }
    graph.with_node_costs(costs)
}
