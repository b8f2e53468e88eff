//! Certification tools: the heuristic-trap construction, an exact stochastic
//! SIS simulator, and exhaustive optimal-removal search for small graphs.

mod adversarial;
mod brute;
mod sis;

pub use adversarial::{make_adversarial, AdversarialInstance};
pub use brute::{brute_force_srm, BruteForce, BRUTE_MAX_EDGES, BRUTE_MAX_NODES};
pub use sis::{sis_simulate, sis_simulate_nonuniform, transmission_radius, SisOutcome};
