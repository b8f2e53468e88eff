//! Closed-walk counts in scaled units `Ã = A/s`.
//!
//! The workhorse is a *chain*: `Ã^{k-1} e_a` for a source `a`, obtained by
//! `k-1` sparse products restricted to the growing ball around `a`. One chain
//! yields `Ã^{k-1}_{ab}` for every neighbour `b` and the diagonal `Ã^k_{aa}`.
//! Edge `(a, b)` with `a < b` always takes its value from the chain at `a`, so
//! every code path that evaluates an edge produces the same bits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::residual::{Adjacency, Residual};

/// Closed-walk counts at length `k` for every live edge and node.
#[derive(Debug, Clone, Serialize)]
pub struct WalkTable {
    pub k: usize,
    pub scale: f64,
    /// `trace(Ãᵏ)`.
    pub total_rooted: f64,
    /// `Ã^{k-1}_{uv}` by edge id; 0 for removed edges.
    pub per_edge: Vec<f64>,
    /// `Ãᵏ_{vv}` by node.
    pub per_node: Vec<f64>,
}

pub(crate) const BLOCK: usize = 8;
/// Width used when every source is needed; each lane is computed exactly as
/// in a narrow block, so results do not depend on the width.
pub(crate) const WIDE: usize = 16;

/// Scratch space for chains over one residual graph.
pub(crate) struct ChainWorkspace<const W: usize = BLOCK> {
    n: usize,
    cur: Vec<[f64; W]>,
    next: Vec<[f64; W]>,
    in_ball: Vec<bool>,
    ball: Vec<usize>,
    frontier: Vec<usize>,
}

impl<const W: usize> ChainWorkspace<W> {
    pub(crate) fn new(n: usize) -> Self {
        ChainWorkspace {
            n,
            cur: vec![[0.0; W]; n],
            next: vec![[0.0; W]; n],
            in_ball: vec![false; n],
            ball: Vec::new(),
            frontier: Vec::new(),
        }
    }

    /// Runs the chains for up to `W` sources. Afterwards `value(b, j)` is
    /// `Ã^{steps}_{b, sources[j]}`.
    pub(crate) fn run(&mut self, r: &Residual, sources: &[usize], steps: usize, scale: f64) {
        debug_assert!(sources.len() <= W && r.order() == self.n);
        for &v in &self.ball {
            self.in_ball[v] = false;
            self.cur[v] = [0.0; W];
            self.next[v] = [0.0; W];
        }
        self.ball.clear();
        self.frontier.clear();
        for (j, &a) in sources.iter().enumerate() {
            if !self.in_ball[a] {
                self.in_ball[a] = true;
                self.ball.push(a);
                self.frontier.push(a);
            }
            self.cur[a][j] = 1.0;
        }
        let weights = r.is_weighted();
        for _ in 0..steps {
            // Grow the ball by one hop; values outside it are zero.
            let mut grown = Vec::new();
            if self.ball.len() < self.n {
                for &v in &self.frontier {
                    for &w in r.neighbors(v) {
                        let w = w as usize;
                        if !self.in_ball[w] {
                            self.in_ball[w] = true;
                            grown.push(w);
                        }
                    }
                }
                self.ball.extend_from_slice(&grown);
            }
            self.frontier = grown;
            for &v in &self.ball {
                let mut out = [0.0; W];
                let cur = &self.cur;
                if weights {
                    r.for_each_neighbor(v, |w, a| {
                        let src = &cur[w];
                        for j in 0..W {
                            out[j] += a * src[j];
                        }
                    });
                } else {
                    for &w in r.neighbors(v) {
                        let src = &cur[w as usize];
                        for j in 0..W {
                            out[j] += src[j];
                        }
                    }
                }
                for o in out.iter_mut() {
                    *o /= scale;
                }
                self.next[v] = out;
            }
            std::mem::swap(&mut self.cur, &mut self.next);
        }
    }

    #[inline]
    pub(crate) fn value(&self, b: usize, j: usize) -> f64 {
        self.cur[b][j]
    }

    /// Scatters the results for source column `j` (node `a`): per-edge values
    /// for live edges `(a, b)` with `b > a`, and the diagonal `Ãᵏ_{aa}`.
    pub(crate) fn harvest(
        &self,
        r: &Residual,
        a: usize,
        j: usize,
        scale: f64,
        mut edge: impl FnMut(usize, f64),
    ) -> f64 {
        let mut diag = 0.0;
        let nb = r.neighbors(a);
        let ids = r.incident_edges(a);
        match r.weights_of(a) {
            None => {
                for (&b, &id) in nb.iter().zip(ids) {
                    let x = self.value(b as usize, j);
                    diag += x;
                    if b as usize > a {
                        edge(id as usize, x);
                    }
                }
            }
            Some(wt) => {
                for ((&b, &id), &w) in nb.iter().zip(ids).zip(wt) {
                    let x = self.value(b as usize, j);
                    diag += w * x;
                    if b as usize > a {
                        edge(id as usize, x);
                    }
                }
            }
        }
        diag / scale
    }
}

pub(crate) fn check_finite(x: f64, k: usize, scale: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Overflow { k, scale })
    }
}

/// Full table over a residual graph, computing chains in blocks.
pub(crate) fn full_table(r: &Residual, k: usize, scale: f64, ws: &mut ChainWorkspace<WIDE>) -> Result<WalkTable> {
    let n = r.order();
    let mut per_edge = vec![0.0; r.edge_count()];
    let mut per_node = vec![0.0; n];
    let live: Vec<usize> = r.live_nodes().filter(|&v| r.degree(v) > 0).collect();
    for block in live.chunks(WIDE) {
        ws.run(r, block, k - 1, scale);
        for (j, &a) in block.iter().enumerate() {
            per_node[a] = ws.harvest(r, a, j, scale, |id, x| per_edge[id] = x);
        }
    }
    let mut total = 0.0;
    for &d in &per_node {
        total += d;
    }
    check_finite(total, k, scale)?;
    if per_edge.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow { k, scale });
    }
    Ok(WalkTable {
        k,
        scale,
        total_rooted: total,
        per_edge,
        per_node,
    })
}

fn check_k(k: usize, scale: f64) -> Result<()> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::Invalid(format!("walk length must be even and at least 2, got {k}")));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Invalid(format!("scale must be positive, got {scale}")));
    }
    Ok(())
}

/// Per-edge `Ã^{k-1}`, per-node `Ãᵏ` diagonal and `trace(Ãᵏ)` for `graph`.
pub fn walk_table_matrix(graph: &Graph, k: usize, scale: f64) -> Result<WalkTable> {
    check_k(k, scale)?;
    let r = Residual::new(graph);
    let mut ws = ChainWorkspace::new(graph.node_count());
    full_table(&r, k, scale, &mut ws)
}

/// `Ã^{k-1}_{uv}` by the edge-first recurrence: `H(·, 1)` is the indicator of
/// `v` (the walk has taken edge `u → v`), every further step sums over
/// neighbours and divides by `scale`, and the answer is `H(u, k)`.
pub fn walk_count_dp(graph: &Graph, u: usize, v: usize, k: usize, scale: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Invalid(format!("walk length must be at least 2, got {k}")));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Invalid(format!("scale must be positive, got {scale}")));
    }
    if u == v || !graph.contains_edge(u, v) {
        return Err(Error::UnknownEdge(crate::graph::Edge { u: u.min(v), v: u.max(v) }));
    }
    let n = graph.node_count();
    let mut h = vec![0.0; n];
    let mut next = vec![0.0; n];
    h[v] = 1.0;
    for _ in 2..=k {
        for (x, out) in next.iter_mut().enumerate() {
            let mut s = 0.0;
            for &y in graph.neighbors(x) {
                s += h[y];
            }
            *out = s / scale;
        }
        std::mem::swap(&mut h, &mut next);
    }
    check_finite(h[u], k, scale)
}

/// Exact number of rooted closed walks of length `k`, by depth-first
/// enumeration of walk prefixes. Limited to `n ≤ 14`, `1 ≤ k ≤ 10`.
pub fn enumerate_closed_walks(graph: &Graph, k: usize) -> Result<u64> {
    let n = graph.node_count();
    if n > 14 || k > 10 || k == 0 {
        return Err(Error::SizeGuard(format!(
            "walk enumeration needs n <= 14 and 1 <= k <= 10 (n = {n}, k = {k})"
        )));
    }
    let adj: Vec<u16> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u16, |m, &w| m | (1 << w)))
        .collect();

    fn extend(adj: &[u16], root: usize, cur: usize, left: usize) -> u64 {
        if left == 1 {
            return u64::from(adj[cur] >> root & 1);
        }
        let mut total = 0;
        let mut m = adj[cur];
        while m != 0 {
            let w = m.trailing_zeros() as usize;
            m &= m - 1;
            total += extend(adj, root, w, left - 1);
        }
        total
    }

    Ok((0..n).map(|root| extend(&adj, root, root, k)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn triangle_tables() {
        let t = walk_table_matrix(&k3(), 4, 1.0).unwrap();
        assert_eq!(t.total_rooted, 18.0);
        let t = walk_table_matrix(&k3(), 2, 1.0).unwrap();
        assert_eq!(t.total_rooted, 6.0);
        assert_eq!(t.per_edge, vec![1.0, 1.0, 1.0]);
        assert_eq!(t.per_node, vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn rejects_odd_k_and_overflow() {
        assert!(walk_table_matrix(&k3(), 3, 1.0).is_err());
        assert!(matches!(walk_table_matrix(&k3(), 64, 1e-6), Err(Error::Overflow { .. })));
    }

    #[test]
    fn dp_examples() {
        assert_eq!(walk_count_dp(&k3(), 0, 1, 2, 1.0).unwrap(), 1.0);
        let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(walk_count_dp(&p3, 0, 1, 4, 1.0).unwrap(), 2.0);
        assert!(walk_count_dp(&p3, 0, 2, 4, 1.0).is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_closed_walks(&k3(), 3).unwrap(), 6);
        let p4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(enumerate_closed_walks(&p4, 2).unwrap(), 6);
        assert_eq!(enumerate_closed_walks(&Graph::from_edges(5, []).unwrap(), 4).unwrap(), 0);
        assert!(enumerate_closed_walks(&Graph::from_edges(15, []).unwrap(), 2).is_err());
    }

    #[test]
    fn block_and_single_chains_agree_bitwise() {
        let g = Graph::from_edges(7, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6), (2, 5)]).unwrap();
        let r = Residual::new(&g);
        let mut wide = ChainWorkspace::new(7);
        let table = full_table(&r, 6, 1.7, &mut wide).unwrap();
        let mut ws: ChainWorkspace = ChainWorkspace::new(7);
        for a in 0..7 {
            ws.run(&r, &[a], 5, 1.7);
            let d = ws.harvest(&r, a, 0, 1.7, |id, x| assert_eq!(x.to_bits(), table.per_edge[id].to_bits()));
            assert_eq!(d.to_bits(), table.per_node[a].to_bits());
        }
    }
}
