//! Spectral radius reduction for epidemic control.
//!
//! Removes cheap edge or node sets so that the largest adjacency eigenvalue
//! of a contact network drops below the SIS epidemic threshold `T = δ/β`.
//! The core algorithms count closed walks of length `k` and treat removal as
//! a partial covering problem over those walks.

pub mod error;
pub mod generate;
pub mod graph;
pub mod heuristics;
pub mod rates;
pub mod residual;
pub mod greedy;
pub mod plan;
pub mod primal_dual;
pub mod sparsify;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use graph::{load_edge_list, apply_node_costs, CostMode, Edge, Graph, LoadedGraph};
pub use rates::TransmissionMatrix;
pub use greedy::{
    greedy_edge_choice_lazy, greedy_walk_edges, greedy_walk_nodes, greedy_walk_nonuniform, Backend, GreedyConfig,
    StopRule, WalkLength,
};
pub use heuristics::{
    eigen_score_plan, eigen_score_plan_with, hybrid_plan, line_pagerank_plan, line_pagerank_plan_with, node_heuristic_plan,
    product_degree_plan, product_degree_plan_with, NodeScorer, Scoring,
};
pub use plan::{Item, RemovalKind, RemovalPlan, Stop};
pub use primal_dual::{hit_walks, primal_dual_cover, CoverState, HitWalksMode};
pub use sparsify::{density_reduction, greedy_walk_sparse, max_degree_reduction};
pub use validation::{
    brute_force_srm, make_adversarial, sis_simulate, sis_simulate_nonuniform, transmission_radius, AdversarialInstance,
    BruteForce, SisOutcome,
};
