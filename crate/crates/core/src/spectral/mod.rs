//! Numerical kernel: leading eigenpairs, closed-walk counts, PageRank.

mod pagerank;
mod power;
pub(crate) mod walks;

pub use pagerank::{line_pagerank, pagerank};
pub use power::{power_iteration, spectral_radius, PowerOptions, SpectralReport};
pub use walks::{enumerate_closed_walks, walk_count_dp, walk_table_matrix, WalkTable};
