//! Seeded random graph models. Every generator draws from ChaCha8 so the same
//! seed gives the same graph on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rates::TransmissionMatrix;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Number of failures before the next success of a Bernoulli(p) sequence.
fn skip(r: &mut ChaCha8Rng, p: f64) -> usize {
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = 1.0 - r.random::<f64>();
    (u.ln() / (1.0 - p).ln()).floor().min(usize::MAX as f64 / 4.0) as usize
}

/// G(n, p) in O(n + m) by geometric skipping over the pair list.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    if p > 0.0 {
        let mut r = rng(seed);
        for u in 0..n {
            let mut v = u + 1 + skip(&mut r, p);
            while v < n {
                edges.push((u, v));
                v += 1 + skip(&mut r, p);
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Preferential attachment: start from a clique on `attach + 1` nodes, then
/// each new node links to `attach` distinct existing nodes chosen with
/// probability proportional to degree.
pub fn barabasi_albert(n: usize, attach: usize, seed: u64) -> Result<Graph> {
    if attach == 0 || n <= attach {
        return Err(Error::Invalid(format!("need 0 < attach < n, got attach = {attach}, n = {n}")));
    }
    let mut r = rng(seed);
    let mut edges = Vec::new();
    // Every edge endpoint once: sampling from it is degree-proportional.
    let mut ends = Vec::new();
    for a in 0..=attach {
        for b in a + 1..=attach {
            edges.push((a, b));
            ends.extend([a, b]);
        }
    }
    let mut chosen = Vec::with_capacity(attach);
    for v in attach + 1..n {
        chosen.clear();
        while chosen.len() < attach {
            let w = ends[r.random_range(0..ends.len())];
            if !chosen.contains(&w) {
                chosen.push(w);
            }
        }
        for &w in &chosen {
            edges.push((w, v));
            ends.extend([w, v]);
        }
    }
    Graph::from_edges(n, edges)
}

/// Chung–Lu graph: edge `(u, v)` present with probability
/// `min(1, w_u w_v / Σw)`. Runs in O(n + m) by visiting nodes in decreasing
/// weight and skipping geometrically.
pub fn chung_lu(weights: &[f64], seed: u64) -> Result<Graph> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Invalid(format!("weight {w} is not a nonnegative number")));
    }
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let w: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
    let mut r = rng(seed);
    let mut edges = Vec::new();
    if total > 0.0 {
        for u in 0..n {
            let mut v = u + 1;
            let mut p = if v < n { (w[u] * w[v] / total).min(1.0) } else { 0.0 };
            while v < n && p > 0.0 {
                if p < 1.0 {
                    v += skip(&mut r, p);
                }
                if v < n {
                    let q = (w[u] * w[v] / total).min(1.0);
                    if r.random::<f64>() < q / p {
                        edges.push((order[u], order[v]));
                    }
                    p = q;
                    v += 1;
                }
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Chung–Lu graph with power-law expected degrees `∝ (i + i₀)^{−1/(γ−1)}`,
/// scaled to the requested mean degree.
pub fn power_law(n: usize, mean_degree: f64, exponent: f64, seed: u64) -> Result<Graph> {
    if !(exponent > 2.0) {
        return Err(Error::Invalid(format!("power-law exponent must exceed 2, got {exponent}")));
    }
    let alpha = 1.0 / (exponent - 1.0);
    // Offset keeps the largest expected degree near √(n · mean).
    let i0 = ((n as f64).powf(1.0 - 2.0 * alpha) * 10.0).max(1.0);
    let raw: Vec<f64> = (0..n).map(|i| (i as f64 + i0).powf(-alpha)).collect();
    let scale = mean_degree * n as f64 / raw.iter().sum::<f64>();
    chung_lu(&raw.iter().map(|x| x * scale).collect::<Vec<_>>(), seed)
}

/// Independent uniform rates in `[lo, hi)` on every edge.
pub fn random_rates(graph: &Graph, lo: f64, hi: f64, recovery: f64, seed: u64) -> Result<TransmissionMatrix> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::Invalid(format!("need 0 < lo <= hi, got [{lo}, {hi})")));
    }
    let mut r = rng(seed);
    let rates = (0..graph.edge_count())
        .map(|_| if hi > lo { r.random_range(lo..hi) } else { lo })
        .collect();
    TransmissionMatrix::from_rates(graph, rates, recovery)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_density_and_determinism() {
        let g = erdos_renyi(400, 0.05, 1).unwrap();
        let expect = 0.05 * 400.0 * 399.0 / 2.0;
        assert!((g.edge_count() as f64 - expect).abs() < 4.0 * expect.sqrt());
        assert_eq!(g, erdos_renyi(400, 0.05, 1).unwrap());
        assert_ne!(g, erdos_renyi(400, 0.05, 2).unwrap());
        assert_eq!(erdos_renyi(10, 1.0, 0).unwrap().edge_count(), 45);
        assert_eq!(erdos_renyi(10, 0.0, 0).unwrap().edge_count(), 0);
    }

    #[test]
    fn ba_edge_count_and_min_degree() {
        let g = barabasi_albert(500, 3, 4).unwrap();
        assert_eq!(g.edge_count(), 6 + 3 * (500 - 4));
        assert!(g.degrees().iter().all(|&d| d >= 3));
        assert!(g.max_degree() > 20);
    }

    #[test]
    fn chung_lu_mean_degree() {
        let g = power_law(5000, 6.0, 2.5, 9).unwrap();
        let mean = 2.0 * g.edge_count() as f64 / 5000.0;
        assert!((mean - 6.0).abs() < 0.6, "{mean}");
        assert!(g.max_degree() > 40);
        let flat = chung_lu(&vec![4.0; 2000], 3).unwrap();
        let mean = 2.0 * flat.edge_count() as f64 / 2000.0;
        assert!((mean - 4.0).abs() < 0.3, "{mean}");
    }

    #[test]
    fn rates_in_range() {
        let g = erdos_renyi(50, 0.2, 0).unwrap();
        let t = random_rates(&g, 0.1, 0.3, 1.0, 5).unwrap();
        assert!(t.rates().iter().all(|&b| (0.1..0.3).contains(&b)));
    }
}
