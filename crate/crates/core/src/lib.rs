//! Max-plus matrix algebra: powers, Kleene stars, critical graphs, CSR
//! expansions of matrix powers and orbit periodicity of reducible matrices.
//!
//! Nodes are numbered from 0. The semiring zero is `f64::NEG_INFINITY`.

pub mod csr;
pub mod error;
pub mod expansion;
pub mod fixtures;
pub mod graph;
pub mod kleene;
pub mod matrix;
pub mod oracle;
pub mod orbit;

pub use csr::{
    csr_build, csr_group_check, csr_product, csr_rotate, Block, CriticalSelection, CsrProduct,
    CsrTriple,
};
pub use error::{Error, Result};
pub use expansion::{
    default_threshold_horizon, evaluate, fast_terms, nachtigall_expand, ultimate_expand,
    ultimate_threshold, DeflationStep, Expansion, ExpansionEvaluation, ExpansionKind,
    ExpansionTerm, Threshold,
};
pub use graph::{
    critical_structure, max_cycle_mean, max_cycle_mean_of, scc_decompose, strong_access,
    strong_access_matrix, CriticalStructure, CriticalSubgraph, CyclicComponent, Digraph,
    SccDecomposition,
};
pub use kleene::{
    apply_scaling, kleene_star, total_visualizing_scaling, visualizing_scaling, Scaling,
};
pub use matrix::{oplus, otimes, TropicalMatrix, TropicalVector, UNIT, ZERO};
pub use orbit::{
    column_periodicity, is_orbit_periodic, orbit_conditions, orbit_growth_rate, pair_periodicity,
    simulate_orbit, OrbitReport, OrbitTrace, SupportViolation,
};
