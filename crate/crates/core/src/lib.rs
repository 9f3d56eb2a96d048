//! Packing and covering of minor-models that meet prescribed vertex sets.
//!
//! The crate provides exact desk-scale oracles for packing and covering
//! numbers, the linkage-or-separation dichotomy, rooted grid constructions,
//! the bounded-treewidth packing argument, a recursion skeleton with
//! configurable thresholds, and generators for the negative family.

pub mod counterexample;
pub mod engine;
pub mod enumerate;
pub mod error;
pub mod flow;
pub mod graph;
pub mod linkage;
pub mod minor_model;
pub mod pack_cover;
pub mod rooted_grid;
pub mod treewidth;
pub mod vset;

pub use error::{Budget, EpError, Result};
pub use graph::{grid_graph, Graph, GridGraph, RootedGraph, Separation};
pub use vset::{VSet, Vertex};
