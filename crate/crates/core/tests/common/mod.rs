#![allow(dead_code)]

use immunet::Graph;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for e in g.edges() {
        a[(e.u, e.v)] = 1.0;
        a[(e.v, e.u)] = 1.0;
    }
    a
}

/// Largest adjacency eigenvalue from a dense symmetric eigensolver.
pub fn dense_lambda(g: &Graph) -> f64 {
    if g.edge_count() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(adjacency(g)).eigenvalues.max()
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

fn connected(n: usize, adj: &[u32]) -> bool {
    let mut seen = 1u32;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        let mut fresh = adj[v] & !seen;
        seen |= fresh;
        while fresh != 0 {
            let w = fresh.trailing_zeros() as usize;
            fresh &= fresh - 1;
            stack.push(w);
        }
    }
    seen == (1u32 << n) - 1
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Smallest edge bitmask over all relabellings.
fn canonical(n: usize, mask: u32, ps: &[(usize, usize)], perms: &[Vec<usize>]) -> u32 {
    let index = |a: usize, b: usize| {
        let (a, b) = (a.min(b), a.max(b));
        ps.iter().position(|&p| p == (a, b)).unwrap()
    };
    let mut table = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                table[a][b] = index(a, b);
            }
        }
    }
    perms
        .iter()
        .map(|p| {
            let mut m = 0u32;
            for (i, &(a, b)) in ps.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    m |= 1 << table[p[a]][p[b]];
                }
            }
            m
        })
        .min()
        .unwrap()
}

fn graph_of(n: usize, mask: u32, ps: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, ps.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p)).unwrap()
}

fn adj_of(n: usize, mask: u32, ps: &[(usize, usize)]) -> Vec<u32> {
    let mut adj = vec![0u32; n];
    for (i, &(a, b)) in ps.iter().enumerate() {
        if mask >> i & 1 == 1 {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    adj
}

/// One representative per isomorphism class of connected graphs on exactly
/// `n` nodes with at least one edge.
pub fn connected_classes(n: usize) -> Vec<Graph> {
    let ps = pairs(n);
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    for mask in 1u32..(1u32 << ps.len()) {
        if connected(n, &adj_of(n, mask, &ps)) {
            seen.insert(canonical(n, mask, &ps, &perms));
        }
    }
    seen.into_iter().map(|m| graph_of(n, m, &ps)).collect()
}

/// `count` distinct classes of connected 7-node graphs with at most
/// `max_edges` edges, drawn by seeded rejection sampling.
pub fn sampled_classes7(count: usize, max_edges: usize, seed: u64) -> Vec<Graph> {
    let n = 7;
    let ps = pairs(n);
    let perms = permutations(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let m = rng.random_range(n - 1..=max_edges);
        let mut mask = 0u32;
        while mask.count_ones() < m as u32 {
            mask |= 1 << rng.random_range(0..ps.len());
        }
        if !connected(n, &adj_of(n, mask, &ps)) {
            continue;
        }
        let c = canonical(n, mask, &ps, &perms);
        if seen.insert(c) {
            out.push(graph_of(n, c, &ps));
        }
    }
    out
}

/// The small-graph family used by the approximation and pruning checks:
/// every connected class on 2..=6 nodes with at most `max_edges` edges,
/// plus `extra7` sampled 7-node classes.
pub fn small_family(max_edges: usize, extra7: usize) -> Vec<Graph> {
    let mut all: Vec<Graph> = (2..=6)
        .flat_map(connected_classes)
        .filter(|g| g.edge_count() <= max_edges)
        .collect();
    all.extend(sampled_classes7(extra7, max_edges, 7));
    all
}

/// Seeded G(n, p) with `n` and `p` drawn from the given ranges.
pub fn random_small(seed: u64, n_lo: usize, n_hi: usize, p_lo: f64, p_hi: f64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(n_lo..=n_hi);
    let p = rng.random_range(p_lo..=p_hi);
    immunet::generate::erdos_renyi(n, p, seed).unwrap()
}
