mod common;

use common::adjacency;
use immunet::spectral::{enumerate_closed_walks, walk_count_dp, walk_table_matrix};
use immunet::Graph;
use proptest::prelude::*;

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
    Graph::from_edges(n, pairs.enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p)).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn table_matches_dense_powers(n in 2usize..10, mask in any::<u64>(), half in 1usize..5, scale in prop::sample::select(vec![1.0, 1.7, 3.0])) {
        let g = graph_from_mask(n, mask);
        prop_assume!(g.edge_count() > 0);
        let k = 2 * half;
        let a = adjacency(&g) / scale;
        let pk1 = a.pow((k - 1) as u32);
        let pk = &pk1 * &a;
        let t = walk_table_matrix(&g, k, scale).unwrap();
        prop_assert!(close(t.total_rooted, pk.trace()));
        for v in 0..n {
            prop_assert!(close(t.per_node[v], pk[(v, v)]));
        }
        for (id, e) in g.edges().iter().enumerate() {
            prop_assert!(close(t.per_edge[id], pk1[(e.u, e.v)]));
            prop_assert!(close(walk_count_dp(&g, e.u, e.v, k, scale).unwrap(), pk1[(e.u, e.v)]));
        }
    }

    #[test]
    fn enumeration_matches_trace(n in 2usize..9, mask in any::<u64>(), k in 1usize..9) {
        let g = graph_from_mask(n, mask);
        let exact = enumerate_closed_walks(&g, k).unwrap() as f64;
        let a = adjacency(&g);
        prop_assert_eq!(exact, a.pow(k as u32).trace());
    }
}

#[test]
fn odd_cycles_have_no_odd_walks_on_bipartite_graphs() {
    let c6 = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
    assert_eq!(enumerate_closed_walks(&c6, 3).unwrap(), 0);
    assert_eq!(enumerate_closed_walks(&c6, 5).unwrap(), 0);
    // C(4,2) closed 4-walks per node on a cycle.
    assert_eq!(enumerate_closed_walks(&c6, 4).unwrap(), 6 * 6);
}

#[test]
fn scaling_divides_by_the_power() {
    let g = common::complete(5);
    let a = walk_table_matrix(&g, 6, 1.0).unwrap();
    let b = walk_table_matrix(&g, 6, 2.0).unwrap();
    assert!(close(a.total_rooted / 64.0, b.total_rooted));
    for (x, y) in a.per_edge.iter().zip(&b.per_edge) {
        assert!(close(x / 32.0, *y));
    }
}
