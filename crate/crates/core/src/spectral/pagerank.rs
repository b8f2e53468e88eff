use crate::graph::Graph;

const MAX_ITERS: usize = 10_000;

/// PageRank with uniform teleportation. Mass sitting on isolated nodes is
/// spread uniformly, so the result always sums to 1.
pub fn pagerank(graph: &Graph, damping: f64, tolerance: f64) -> Vec<f64> {
    let n = graph.node_count();
    let deg: Vec<f64> = (0..n).map(|v| graph.degree(v) as f64).collect();
    iterate(n, damping, tolerance, |p, out| {
        for (v, o) in out.iter_mut().enumerate() {
            *o = graph.neighbors(v).iter().map(|&w| p[w] / deg[w]).sum();
        }
        (0..n).filter(|&v| deg[v] == 0.0).map(|v| p[v]).sum()
    })
}

/// PageRank of the line graph, indexed by edge id, without building it.
///
/// A line-graph node `e = (u, v)` has degree `d(u) + d(v) − 2`, and its
/// neighbours are the other edges at `u` and at `v`; per-node sums of
/// `p(f)/deg(f)` give every edge's incoming mass in O(m).
pub fn line_pagerank(graph: &Graph, damping: f64, tolerance: f64) -> Vec<f64> {
    let m = graph.edge_count();
    let edges = graph.edges();
    let ldeg: Vec<f64> = edges
        .iter()
        .map(|e| (graph.degree(e.u) + graph.degree(e.v) - 2) as f64)
        .collect();
    let mut at_node = vec![0.0; graph.node_count()];
    iterate(m, damping, tolerance, |p, out| {
        at_node.fill(0.0);
        let mut dangling = 0.0;
        for (id, e) in edges.iter().enumerate() {
            if ldeg[id] == 0.0 {
                dangling += p[id];
                continue;
            }
            let q = p[id] / ldeg[id];
            at_node[e.u] += q;
            at_node[e.v] += q;
        }
        for (id, e) in edges.iter().enumerate() {
            out[id] = if ldeg[id] == 0.0 {
                0.0
            } else {
                let q = p[id] / ldeg[id];
                at_node[e.u] + at_node[e.v] - 2.0 * q
            };
        }
        dangling
    })
}

// `step(p, out)` writes the link-following mass into `out` and returns the
// dangling mass.
fn iterate(n: usize, damping: f64, tolerance: f64, mut step: impl FnMut(&[f64], &mut [f64]) -> f64) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let mut p = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..MAX_ITERS {
        let dangling = step(&p, &mut next);
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        for o in next.iter_mut() {
            *o = base + damping * *o;
        }
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        let delta: f64 = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut p, &mut next);
        if delta < tolerance {
            break;
        }
    }
    p
}
