//! Reachability, shortest hyperpath-trees, Viterbi outside costs and beam
//! pruning over ordered multi-hypergraphs, plus the reduction from weighted
//! regular tree grammars (and context-free grammars) to hypergraphs.
//!
//! The pipeline for pruning a hypergraph `G` along a query `X ⇝ y`:
//!
//! 1. [`reach::reduce`] drops everything not on some hyperpath-tree `X ⇝ y`;
//! 2. [`inside::viterbi_inside`] computes cheapest trees `X ⇝ v` for all `v`;
//! 3. [`outside::viterbi_outside`] computes cheapest completions `v ⇝ y`;
//! 4. [`outside::prune`] keeps the vertices and arcs used by some tree whose
//!    cost is within a beam of the optimum.
//!
//! Costs are `f64` in the min-plus sense with `+∞` meaning "unreached".

pub mod fixtures;
pub mod grammar;
pub mod graph;
pub mod inside;
pub mod oracle;
pub mod outside;
mod queue;
pub mod reach;
pub mod text;
pub mod tree;

pub use graph::{ArcId, ArcSpec, GraphError, Hypergraph, HypergraphBuilder, Query, Subgraph, VertexId};
pub use inside::{extract_best_tree, viterbi_inside, InsideResult};
pub use outside::{prune, utilities, viterbi_outside, OutsideResult, Pruning, Utilities};
pub use reach::{reach_from, reach_to, reduce, Reduction};
pub use text::{format_cost, Document};
pub use tree::HyperpathTree;
