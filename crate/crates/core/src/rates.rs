//! Per-edge transmission rates for the non-uniform SIS model.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// Symmetric rates `beta_ij` defined on exactly the edges of a graph, plus the
/// recovery rate `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMatrix {
    rates: Vec<f64>,
    recovery: f64,
}

impl TransmissionMatrix {
    pub fn uniform(graph: &Graph, beta: f64, recovery: f64) -> Result<Self> {
        Self::from_rates(graph, vec![beta; graph.edge_count()], recovery)
    }

    /// Rates indexed by edge id of `graph`.
    pub fn from_rates(graph: &Graph, rates: Vec<f64>, recovery: f64) -> Result<Self> {
        if rates.len() != graph.edge_count() {
            return Err(Error::Invalid(format!(
                "{} rates for {} edges",
                rates.len(),
                graph.edge_count()
            )));
        }
        if let Some(b) = rates.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::Invalid(format!("transmission rate {b} is not positive")));
        }
        if !(recovery.is_finite() && recovery > 0.0) {
            return Err(Error::Invalid(format!("recovery rate {recovery} is not positive")));
        }
        Ok(TransmissionMatrix { rates, recovery })
    }

    /// Builds from directed entries `(i, j, beta)`. Both orientations may be
    /// listed but must agree; every edge of the graph needs a rate.
    pub fn from_entries(
        graph: &Graph,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
        recovery: f64,
    ) -> Result<Self> {
        let mut seen: HashMap<usize, f64> = HashMap::new();
        for (i, j, b) in entries {
            let id = graph
                .edge_index(i, j)
                .ok_or_else(|| Error::Invalid(format!("rate given for non-edge ({i}, {j})")))?;
            if let Some(&old) = seen.get(&id) {
                if old != b {
                    return Err(Error::Invalid(format!(
                        "asymmetric rates on edge {}: {old} vs {b}",
                        Edge::new(i, j)
                    )));
                }
            }
            seen.insert(id, b);
        }
        let mut rates = Vec::with_capacity(graph.edge_count());
        for id in 0..graph.edge_count() {
            match seen.get(&id) {
                Some(&b) => rates.push(b),
                None => {
                    return Err(Error::Invalid(format!("edge {} has no rate", graph.edge(id))));
                }
            }
        }
        Self::from_rates(graph, rates, recovery)
    }

    /// Parses `u v beta` lines using the graph's external node ids.
    pub fn read<R: BufRead>(graph: &Graph, reader: R, recovery: f64) -> Result<Self> {
        let mut entries = Vec::new();
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
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected `u v beta`".into(),
                });
            }
            let bad = |what: &str| Error::Parse {
                line: lineno,
                message: format!("bad {what}"),
            };
            let a: u64 = f[0].parse().map_err(|_| bad("node id"))?;
            let b: u64 = f[1].parse().map_err(|_| bad("node id"))?;
            let beta: f64 = f[2].parse().map_err(|_| bad("rate"))?;
            let a = graph.node_by_label(a).ok_or_else(|| bad("node id"))?;
            let b = graph.node_by_label(b).ok_or_else(|| bad("node id"))?;
            entries.push((a, b, beta));
        }
        Self::from_entries(graph, entries, recovery)
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn rate(&self, edge_id: usize) -> f64 {
        self.rates[edge_id]
    }

    pub fn recovery(&self) -> f64 {
        self.recovery
    }

    /// Restricts the rates to the edges surviving in `residual`, which must be
    /// a subgraph of `graph`.
    pub fn restrict(&self, graph: &Graph, residual: &Graph) -> Result<Self> {
        let rates = residual
            .edges()
            .iter()
            .map(|e| {
                graph
                    .edge_index(e.u, e.v)
                    .map(|id| self.rates[id])
                    .ok_or(Error::UnknownEdge(*e))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rates(residual, rates, self.recovery)
    }
}
