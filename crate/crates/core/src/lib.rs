//! Matchings in 3-uniform hypergraphs.
//!
//! The crate bundles the pieces needed to study minimum-degree conditions for
//! large matchings: a compact hypergraph type, generators for the extremal
//! families, link-graph analysis, an exact branch-and-bound solver, a local
//! search built from swap moves, the constructive matcher for hypergraphs
//! close to the extremal family `H_{n,d}`, and an absorbing-matching pipeline.

pub mod absorbing;
pub mod augment;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod extremal;
pub mod format;
pub mod harness;
pub mod hypergraph;
pub mod link;
pub mod rng;
pub mod vset;

pub use error::{Error, Result};
pub use exact::{SolveBudget, SolveReport};
pub use hypergraph::{threshold, Edge, EdgeType, Hypergraph3, Matching, Partition};
pub use vset::VertexSet;
