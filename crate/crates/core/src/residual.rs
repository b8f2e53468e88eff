//! Mutable working copy of a graph used inside the iterative algorithms.
//!
//! Every algorithm here removes one item at a time and re-runs a sparse
//! kernel on what is left. [`Residual`] keeps the original CSR layout with a
//! live length per row, so a removal costs O(degree) and neighbour order
//! (hence floating-point summation order) never depends on removal history.

use crate::graph::{Edge, Graph};
use crate::rates::TransmissionMatrix;

/// Symmetric nonnegative operator over `0..order()`.
pub trait Adjacency {
    fn order(&self) -> usize;

    /// `y = M x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, v: usize, f: F);

    /// Sum of the entries of row `v`.
    fn row_sum(&self, v: usize) -> f64 {
        let mut s = 0.0;
        self.for_each_neighbor(v, |_, w| s += w);
        s
    }
}

impl Adjacency for Graph {
    fn order(&self) -> usize {
        self.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (v, out) in y.iter_mut().enumerate() {
            *out = self.neighbors(v).iter().map(|&w| x[w]).sum();
        }
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, v: usize, mut f: F) {
        for &w in self.neighbors(v) {
            f(w, 1.0);
        }
    }

    fn row_sum(&self, v: usize) -> f64 {
        self.degree(v) as f64
    }
}

#[derive(Debug, Clone)]
pub struct Residual {
    n: usize,
    offsets: Vec<usize>,
    len: Vec<usize>,
    nbr: Vec<u32>,
    eid: Vec<u32>,
    wt: Option<Vec<f64>>,
    edges: Vec<Edge>,
    edge_alive: Vec<bool>,
    node_alive: Vec<bool>,
    live_edges: usize,
}

impl Residual {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut nbr = Vec::with_capacity(2 * graph.edge_count());
        let mut eid = Vec::with_capacity(2 * graph.edge_count());
        let mut len = Vec::with_capacity(n);
        offsets.push(0);
        for v in 0..n {
            for (w, id) in graph.incident(v) {
                nbr.push(w as u32);
                eid.push(id as u32);
            }
            len.push(graph.degree(v));
            offsets.push(nbr.len());
        }
        Residual {
            n,
            offsets,
            len,
            nbr,
            eid,
            wt: None,
            edges: graph.edges().to_vec(),
            edge_alive: vec![true; graph.edge_count()],
            node_alive: graph.present_mask().to_vec(),
            live_edges: graph.edge_count(),
        }
    }

    /// Weighted copy whose entries are the transmission rates.
    pub fn weighted(graph: &Graph, rates: &TransmissionMatrix) -> Self {
        let mut r = Self::new(graph);
        r.wt = Some(r.eid.iter().map(|&id| rates.rate(id as usize)).collect());
        r
    }

    pub fn is_weighted(&self) -> bool {
        self.wt.is_some()
    }

    /// Weights of the live entries of row `v`, aligned with [`Self::neighbors`].
    pub fn weights_of(&self, v: usize) -> Option<&[f64]> {
        self.wt
            .as_ref()
            .map(|wt| &wt[self.offsets[v]..self.offsets[v] + self.len[v]])
    }

    pub fn live_edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn is_edge_alive(&self, id: usize) -> bool {
        self.edge_alive[id]
    }

    pub fn is_node_alive(&self, v: usize) -> bool {
        self.node_alive[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.len[v]
    }

    /// Live neighbours of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.nbr[self.offsets[v]..self.offsets[v] + self.len[v]]
    }

    /// Live edge ids incident to `v`, in neighbour order.
    pub fn incident_edges(&self, v: usize) -> &[u32] {
        &self.eid[self.offsets[v]..self.offsets[v] + self.len[v]]
    }

    pub fn live_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&id| self.edge_alive[id])
    }

    pub fn live_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.node_alive[v])
    }

    fn unlink(&mut self, v: usize, w: usize) {
        let start = self.offsets[v];
        let end = start + self.len[v];
        let pos = start
            + self.nbr[start..end]
                .binary_search(&(w as u32))
                .expect("residual adjacency out of sync");
        self.nbr.copy_within(pos + 1..end, pos);
        self.eid.copy_within(pos + 1..end, pos);
        if let Some(wt) = self.wt.as_mut() {
            wt.copy_within(pos + 1..end, pos);
        }
        self.len[v] -= 1;
    }

    /// Removes a live edge. Returns false if it was already gone.
    pub fn remove_edge(&mut self, id: usize) -> bool {
        if !self.edge_alive[id] {
            return false;
        }
        let e = self.edges[id];
        self.unlink(e.u, e.v);
        self.unlink(e.v, e.u);
        self.edge_alive[id] = false;
        self.live_edges -= 1;
        true
    }

    /// Removes a node and all its live edges; returns the removed edge ids.
    pub fn remove_node(&mut self, v: usize) -> Vec<usize> {
        let ids: Vec<usize> = self.incident_edges(v).iter().map(|&i| i as usize).collect();
        for &id in &ids {
            self.remove_edge(id);
        }
        self.node_alive[v] = false;
        ids
    }

    /// `y = M X` for a row-major block `X` of `width` columns.
    pub fn apply_block(&self, x: &[f64], y: &mut [f64], width: usize) {
        for v in 0..self.n {
            let out = &mut y[v * width..(v + 1) * width];
            out.fill(0.0);
            let r = self.offsets[v]..self.offsets[v] + self.len[v];
            match &self.wt {
                None => {
                    for &w in &self.nbr[r] {
                        let src = &x[w as usize * width..(w as usize + 1) * width];
                        for (o, s) in out.iter_mut().zip(src) {
                            *o += s;
                        }
                    }
                }
                Some(wt) => {
                    for (&w, &a) in self.nbr[r.clone()].iter().zip(&wt[r]) {
                        let src = &x[w as usize * width..(w as usize + 1) * width];
                        for (o, s) in out.iter_mut().zip(src) {
                            *o += a * s;
                        }
                    }
                }
            }
        }
    }

    /// Materialises the residual as a [`Graph`], keeping `base`'s costs.
    pub fn to_graph(&self, base: &Graph) -> Graph {
        let dead: Vec<Edge> = (0..self.edges.len())
            .filter(|&id| !self.edge_alive[id])
            .map(|id| self.edges[id])
            .collect();
        let g = base.remove_edges(&dead).expect("residual edges come from base");
        let gone: Vec<usize> = (0..self.n)
            .filter(|&v| !self.node_alive[v] && base.is_present(v))
            .collect();
        if gone.is_empty() {
            g
        } else {
            g.remove_nodes(&gone).expect("residual nodes come from base")
        }
    }
}

impl Adjacency for Residual {
    fn order(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match &self.wt {
            None => {
                for (v, out) in y.iter_mut().enumerate() {
                    let s = self.offsets[v];
                    *out = self.nbr[s..s + self.len[v]].iter().map(|&w| x[w as usize]).sum();
                }
            }
            Some(wt) => {
                for (v, out) in y.iter_mut().enumerate() {
                    let s = self.offsets[v];
                    let e = s + self.len[v];
                    *out = self.nbr[s..e]
                        .iter()
                        .zip(&wt[s..e])
                        .map(|(&w, &a)| a * x[w as usize])
                        .sum();
                }
            }
        }
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, v: usize, mut f: F) {
        let s = self.offsets[v];
        let e = s + self.len[v];
        match &self.wt {
            None => self.nbr[s..e].iter().for_each(|&w| f(w as usize, 1.0)),
            Some(wt) => self.nbr[s..e]
                .iter()
                .zip(&wt[s..e])
                .for_each(|(&w, &a)| f(w as usize, a)),
        }
    }
}

/// Connected components over live edges: `(component id per node, count)`.
pub fn components<A: Adjacency>(a: &A) -> (Vec<usize>, usize) {
    let n = a.order();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        stack.push(s);
        while let Some(v) = stack.pop() {
            a.for_each_neighbor(v, |w, _| {
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            });
        }
        count += 1;
    }
    (comp, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removal_keeps_rows_sorted() {
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 4)]).unwrap();
        let mut r = Residual::new(&g);
        let id = g.edge_index(0, 2).unwrap();
        assert!(r.remove_edge(id));
        assert!(!r.remove_edge(id));
        assert_eq!(r.neighbors(0), &[1, 3, 4]);
        assert_eq!(r.neighbors(2), &[1]);
        assert_eq!(r.live_edge_count(), 5);
        let gone = r.remove_node(0);
        assert_eq!(gone.len(), 3);
        assert_eq!(r.degree(0), 0);
        let h = r.to_graph(&g);
        assert_eq!(h.edges(), &[Edge::new(1, 2), Edge::new(3, 4)]);
        assert!(!h.is_present(0));
    }

    #[test]
    fn block_apply_matches_single() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
        let r = Residual::new(&g);
        let x: Vec<f64> = (0..8).map(|i| i as f64 * 0.5 + 1.0).collect();
        let mut y = vec![0.0; 8];
        r.apply_block(&x, &mut y, 2);
        for c in 0..2 {
            let col: Vec<f64> = (0..4).map(|v| x[v * 2 + c]).collect();
            let mut out = vec![0.0; 4];
            r.apply(&col, &mut out);
            for v in 0..4 {
                assert_eq!(out[v], y[v * 2 + c]);
            }
        }
    }

    #[test]
    fn counts_components() {
        let g = Graph::from_edges(6, [(0, 1), (2, 3), (3, 4)]).unwrap();
        let (comp, count) = components(&g);
        assert_eq!(count, 3);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[2], comp[4]);
        assert_ne!(comp[0], comp[5]);
    }
}
