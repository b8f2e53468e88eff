//! Walk counts over a shrinking residual graph, evaluated eagerly or lazily.
//!
//! Removing edges or nodes can only destroy closed walks, so a count computed
//! on an earlier residual is an upper bound on the current one. Every value
//! carries the version (number of removals so far) it was computed at.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::residual::{Adjacency, Residual};
use crate::spectral::walks::{full_table, ChainWorkspace, BLOCK, WIDE};

pub(crate) struct WalkState {
    pub r: Residual,
    pub k: usize,
    pub scale: f64,
    ws: ChainWorkspace,
    wide: Option<ChainWorkspace<WIDE>>,
    /// `Ã^{k-1}` per edge id, possibly stale.
    pub edge_val: Vec<f64>,
    pub edge_ver: Vec<u64>,
    /// `Ãᵏ_vv` per node, possibly stale.
    pub node_val: Vec<f64>,
    pub node_ver: Vec<u64>,
    pub version: u64,
    /// Lower bound on the current trace: the last exact trace minus an upper
    /// bound on the walks destroyed since.
    trace_floor: f64,
}

impl WalkState {
    pub(crate) fn new(r: Residual, k: usize, scale: f64) -> Self {
        let n = r.order();
        let m = r.edge_count();
        WalkState {
            ws: ChainWorkspace::new(n),
            wide: None,
            r,
            k,
            scale,
            edge_val: vec![f64::INFINITY; m],
            edge_ver: vec![u64::MAX; m],
            node_val: vec![f64::INFINITY; n],
            node_ver: vec![u64::MAX; n],
            version: 0,
            trace_floor: 0.0,
        }
    }

    pub(crate) fn bump(&mut self) {
        self.version += 1;
    }

    /// Recomputes everything; returns the exact `trace(Ãᵏ)`.
    pub(crate) fn full_pass(&mut self) -> Result<f64> {
        let n = self.r.order();
        let wide = self.wide.get_or_insert_with(|| ChainWorkspace::new(n));
        let t = full_table(&self.r, self.k, self.scale, wide)?;
        for id in 0..self.edge_val.len() {
            if self.r.is_edge_alive(id) {
                self.edge_val[id] = t.per_edge[id];
                self.edge_ver[id] = self.version;
            }
        }
        self.node_val = t.per_node;
        self.node_ver.fill(self.version);
        self.trace_floor = t.total_rooted;
        Ok(t.total_rooted)
    }

    /// Refreshes up to [`WIDE`] sources. Calls `on_edge` for every edge whose
    /// value was refreshed.
    pub(crate) fn refresh(&mut self, sources: &[usize], on_edge: impl FnMut(usize, f64)) -> Result<()> {
        debug_assert!(sources.len() <= WIDE);
        if sources.len() <= BLOCK {
            self.ws.run(&self.r, sources, self.k - 1, self.scale);
            let mut vals = Values {
                edge_val: &mut self.edge_val,
                edge_ver: &mut self.edge_ver,
                node_val: &mut self.node_val,
                node_ver: &mut self.node_ver,
            };
            scatter(&self.ws, self.version, sources, on_edge, &self.r, self.scale, &mut vals)
        } else {
            let n = self.r.order();
            let wide = self.wide.get_or_insert_with(|| ChainWorkspace::new(n));
            wide.run(&self.r, sources, self.k - 1, self.scale);
            let wide = self.wide.as_ref().expect("just allocated");
            let mut vals = Values {
                edge_val: &mut self.edge_val,
                edge_ver: &mut self.edge_ver,
                node_val: &mut self.node_val,
                node_ver: &mut self.node_ver,
            };
            scatter(wide, self.version, sources, on_edge, &self.r, self.scale, &mut vals)
        }
        .map_err(|()| Error::Overflow {
            k: self.k,
            scale: self.scale,
        })
    }

    /// Refreshes every stale source, leaving all values current.
    pub(crate) fn refresh_stale(&mut self) -> Result<()> {
        let stale: Vec<usize> = self
            .r
            .live_nodes()
            .filter(|&v| self.r.degree(v) > 0 && !self.node_fresh(v))
            .collect();
        for chunk in stale.chunks(WIDE) {
            self.refresh(chunk, |_, _| {})?;
        }
        Ok(())
    }

    /// Removes a live edge whose value is current. A rooted closed walk
    /// through `(a, b)` uses it at one of `k` positions in one of two
    /// directions, so at most `2k · Ã_ab · Ã^{k-1}_ab` walks disappear.
    pub(crate) fn remove_edge(&mut self, id: usize) {
        debug_assert!(self.edge_fresh(id));
        let lost = 2.0 * self.k as f64 * self.edge_val[id] / self.scale;
        self.trace_floor -= if self.r.is_weighted() { f64::INFINITY } else { lost };
        self.r.remove_edge(id);
        self.bump();
    }

    /// Removes a node whose diagonal is current; at most `k · Ãᵏ_vv` rooted
    /// walks pass through it.
    pub(crate) fn remove_node(&mut self, v: usize) {
        debug_assert!(self.node_fresh(v));
        self.trace_floor -= self.k as f64 * self.node_val[v];
        self.r.remove_node(v);
        self.bump();
    }

    pub(crate) fn edge_fresh(&self, id: usize) -> bool {
        self.edge_ver[id] == self.version
    }

    pub(crate) fn node_fresh(&self, v: usize) -> bool {
        self.node_ver[v] == self.version
    }

    /// Decides `trace(Ãᵏ) ≥ n` with as little work as possible.
    ///
    /// `lambda` is a Rayleigh-quotient lower bound on λ₁ of the residual, so
    /// `(λ/s)ᵏ` bounds the trace from below, as does the running floor;
    /// stale diagonals bound it from above. Only when the two bounds straddle `n` are diagonals refreshed,
    /// largest first; `refreshed` receives the sources that were recomputed.
    /// Returns `(continue, exact trace if it was computed)`.
    pub(crate) fn trace_at_least(
        &mut self,
        n: f64,
        lambda: f64,
        refreshed: &mut Vec<usize>,
    ) -> Result<(bool, Option<f64>)> {
        let lower = (lambda / self.scale).powi(self.k as i32).max(self.trace_floor);
        if lower >= n * (1.0 + 1e-9) {
            return Ok((true, None));
        }
        let mut order: Vec<usize> = (0..self.node_val.len())
            .filter(|&v| self.r.degree(v) > 0)
            .collect();
        // Dead or isolated nodes hold no closed walks.
        for v in 0..self.node_val.len() {
            if self.r.degree(v) == 0 {
                self.node_val[v] = 0.0;
                self.node_ver[v] = self.version;
            }
        }
        let mut upper: f64 = self.node_val.iter().sum();
        if upper < n * (1.0 - 1e-9) {
            return Ok((false, None));
        }
        order.retain(|&v| !self.node_fresh(v));
        order.sort_by(|&a, &b| {
            self.node_val[b]
                .partial_cmp(&self.node_val[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        for chunk in order.chunks(BLOCK) {
            let before: f64 = chunk.iter().map(|&v| self.node_val[v]).sum();
            self.refresh(chunk, |_, _| {})?;
            refreshed.extend_from_slice(chunk);
            let after: f64 = chunk.iter().map(|&v| self.node_val[v]).sum();
            upper += after - before;
            if upper < n * (1.0 - 1e-9) {
                return Ok((false, None));
            }
        }
        // Everything is fresh: sum in node order, as a full pass would.
        let mut exact = 0.0;
        for &d in &self.node_val {
            exact += d;
        }
        self.trace_floor = exact;
        Ok((exact >= n, Some(exact)))
    }
}

struct Values<'a> {
    edge_val: &'a mut [f64],
    edge_ver: &'a mut [u64],
    node_val: &'a mut [f64],
    node_ver: &'a mut [u64],
}

fn scatter<const W: usize>(
    ws: &ChainWorkspace<W>,
    version: u64,
    sources: &[usize],
    mut on_edge: impl FnMut(usize, f64),
    r: &Residual,
    scale: f64,
    out: &mut Values<'_>,
) -> std::result::Result<(), ()> {
    for (j, &a) in sources.iter().enumerate() {
        let mut finite = true;
        let d = ws.harvest(r, a, j, scale, |id, x| {
            finite &= x.is_finite();
            out.edge_val[id] = x;
            out.edge_ver[id] = version;
            on_edge(id, x);
        });
        if !(finite && d.is_finite()) {
            return Err(());
        }
        out.node_val[a] = d;
        out.node_ver[a] = version;
    }
    Ok(())
}

/// Max-heap entry: larger score first, then smaller id.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    pub score: f64,
    pub id: usize,
    pub version: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.id.cmp(&self.id))
            .then_with(|| self.version.cmp(&other.version))
    }
}

/// Index of the best `(score, secondary)` pair, ties to the smaller index;
/// `None` if no candidate has a positive score.
pub(crate) fn argmax(scores: impl Iterator<Item = (usize, f64, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, s, t) in scores {
        if s > 0.0 && best.is_none_or(|(_, bs, bt)| s > bs || (s == bs && t > bt)) {
            best = Some((i, s, t));
        }
    }
    best.map(|(i, _, _)| i)
}
