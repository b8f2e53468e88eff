use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// A clique, a caterpillar and a large star, chained by two bridges.
///
/// Node layout: the clique is `0..=T'` with `v₀ = 0`; each spine node
/// `v₁ … v_{q−1}` is followed by its `T'` leaves; then `v_q` and its
/// `(T'+1)²` leaves.
#[derive(Debug, Clone, Serialize)]
pub struct AdversarialInstance {
    #[serde(skip)]
    pub graph: Graph,
    pub t_prime: usize,
    pub q: usize,
    /// Removing these drives λ₁ below `T'`.
    pub witness_edges: Vec<Edge>,
    pub clique_nodes: Vec<usize>,
    /// Spine and leaves of the caterpillar.
    pub path_nodes: Vec<usize>,
    /// `v_q` and its leaves.
    pub star_nodes: Vec<usize>,
    /// `v₀ … v_q`.
    pub spine: Vec<usize>,
}

pub fn make_adversarial(t_prime: usize, q: usize) -> Result<AdversarialInstance> {
    if t_prime < 2 || q < 3 {
        return Err(Error::Invalid(format!("need T' >= 2 and q >= 3, got T' = {t_prime}, q = {q}")));
    }
    let t = t_prime;
    let star_leaves = (t + 1) * (t + 1);
    let n = (t + 1) + (q - 1) * (t + 1) + 1 + star_leaves;
    let mut edges = Vec::new();

    let clique_nodes: Vec<usize> = (0..=t).collect();
    for a in 0..=t {
        for b in a + 1..=t {
            edges.push((a, b));
        }
    }
    let mut spine = vec![0];
    let mut path_nodes = Vec::new();
    let mut next = t + 1;
    for _ in 1..q {
        let v = next;
        next += 1;
        edges.push((*spine.last().unwrap(), v));
        spine.push(v);
        path_nodes.push(v);
        for _ in 0..t {
            edges.push((v, next));
            path_nodes.push(next);
            next += 1;
        }
    }
    let vq = next;
    next += 1;
    edges.push((spine[q - 1], vq));
    spine.push(vq);
    let mut star_nodes = vec![vq];
    for _ in 0..star_leaves {
        edges.push((vq, next));
        star_nodes.push(next);
        next += 1;
    }
    debug_assert_eq!(next, n);

    // Cutting both bridges isolates the three parts. K_{T'+1} minus an edge
    // has λ₁ < T'; the star needs fewer than T'² leaves, since √(T'²) = T'
    // is not below the threshold; the caterpillar is below
    // 1 + √(1 + T') on its own, which is at most T' once T' ≥ 3. For T' = 2
    // the caterpillar itself stays above the threshold.
    let mut witness = vec![Edge::new(0, spine[1]), Edge::new(spine[q - 1], vq), Edge::new(0, 1)];
    let keep = t * t - 1;
    witness.extend(star_nodes[1 + keep..].iter().map(|&leaf| Edge::new(vq, leaf)));

    Ok(AdversarialInstance {
        graph: Graph::from_edges(n, edges)?,
        t_prime,
        q,
        witness_edges: witness,
        clique_nodes,
        path_nodes,
        star_nodes,
        spine,
    })
}
