//! Removal plans and the bookkeeping shared by every removal algorithm.

use serde::Serialize;

use crate::error::Result;
use crate::graph::{Edge, Graph};
use crate::residual::Residual;
use crate::spectral::{spectral_radius, PowerOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemovalKind {
    EdgeRemoval,
    NodeRemoval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Item {
    Edge(Edge),
    Node(usize),
}

impl std::fmt::Display for Item {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Item::Edge(e) => e.fmt(f),
            Item::Node(v) => v.fmt(f),
        }
    }
}

/// A named contiguous run of steps, e.g. the pruning phases of the sparse
/// variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Phase {
    pub label: String,
    pub len: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemovalPlan {
    pub kind: RemovalKind,
    pub sequence: Vec<Item>,
    /// Running total after each step.
    pub cumulative_cost: Vec<f64>,
    /// λ₁ of the residual graph; index 0 is the input graph.
    pub lambda_trajectory: Vec<f64>,
    pub phases: Vec<Phase>,
    /// Whether the algorithm's stopping condition was reached (as opposed to
    /// running out of items or hitting a budget).
    pub completed: bool,
}

impl RemovalPlan {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn total_cost(&self) -> f64 {
        self.cumulative_cost.last().copied().unwrap_or(0.0)
    }

    pub fn initial_lambda(&self) -> f64 {
        self.lambda_trajectory[0]
    }

    pub fn final_lambda(&self) -> f64 {
        *self.lambda_trajectory.last().expect("trajectory is never empty")
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.sequence
            .iter()
            .filter_map(|i| match i {
                Item::Edge(e) => Some(*e),
                Item::Node(_) => None,
            })
            .collect()
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.sequence
            .iter()
            .filter_map(|i| match i {
                Item::Node(v) => Some(*v),
                Item::Edge(_) => None,
            })
            .collect()
    }

    /// Residual graph after the first `steps` removals.
    pub fn apply_prefix(&self, graph: &Graph, steps: usize) -> Result<Graph> {
        let steps = steps.min(self.len());
        match self.kind {
            RemovalKind::EdgeRemoval => {
                let edges: Vec<Edge> = self.edges().into_iter().take(steps).collect();
                graph.remove_edges(&edges)
            }
            RemovalKind::NodeRemoval => {
                let nodes: Vec<usize> = self.nodes().into_iter().take(steps).collect();
                graph.remove_nodes(&nodes)
            }
        }
    }

    pub fn apply(&self, graph: &Graph) -> Result<Graph> {
        self.apply_prefix(graph, self.len())
    }

    /// Fewest removals after which λ₁ is at most `level`.
    pub fn steps_to_reach(&self, level: f64) -> Option<usize> {
        self.lambda_trajectory.iter().position(|&l| l <= level)
    }

    /// λ₁ after the first `steps` removals, holding the last value past the end.
    pub fn lambda_after(&self, steps: usize) -> f64 {
        self.lambda_trajectory[steps.min(self.len())]
    }
}

/// Stopping rule shared by the baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Stop {
    /// Stop once λ₁ < T.
    Threshold(f64),
    /// Stop after this many removals.
    Budget(usize),
}

/// Incrementally builds a plan while tracking λ₁ of a residual graph with a
/// warm-started power iteration.
pub(crate) struct Recorder {
    plan: RemovalPlan,
    opts: PowerOptions,
    eigenvector: Vec<f64>,
    phase_start: usize,
}

impl Recorder {
    pub(crate) fn new(kind: RemovalKind, r: &Residual, opts: PowerOptions) -> Result<Self> {
        let rep = spectral_radius(r, &opts, None)?;
        Ok(Recorder {
            plan: RemovalPlan {
                kind,
                sequence: Vec::new(),
                cumulative_cost: Vec::new(),
                lambda_trajectory: vec![rep.lambda1],
                phases: Vec::new(),
                completed: false,
            },
            opts,
            eigenvector: rep.eigenvector,
            phase_start: 0,
        })
    }

    pub(crate) fn lambda(&self) -> f64 {
        self.plan.final_lambda()
    }

    pub(crate) fn eigenvector(&self) -> &[f64] {
        &self.eigenvector
    }

    pub(crate) fn len(&self) -> usize {
        self.plan.sequence.len()
    }

    /// Records an item already removed from `r` and refreshes λ₁.
    pub(crate) fn push(&mut self, item: Item, cost: f64, r: &Residual) -> Result<f64> {
        let step = self.plan.sequence.len() + 1;
        let rep = spectral_radius(r, &self.opts, Some(&self.eigenvector)).map_err(|e| e.at_step(step))?;
        let total = self.plan.total_cost() + cost;
        self.plan.sequence.push(item);
        self.plan.cumulative_cost.push(total);
        self.plan.lambda_trajectory.push(rep.lambda1);
        self.eigenvector = rep.eigenvector;
        Ok(rep.lambda1)
    }

    pub(crate) fn end_phase(&mut self, label: &str) {
        let len = self.plan.sequence.len() - self.phase_start;
        self.plan.phases.push(Phase {
            label: label.to_string(),
            len,
        });
        self.phase_start = self.plan.sequence.len();
    }

    pub(crate) fn finish(mut self, completed: bool) -> RemovalPlan {
        self.plan.completed = completed;
        self.plan
    }
}
