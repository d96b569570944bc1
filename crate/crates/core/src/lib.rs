//! Fuzzy graph clustering through node sense induction, plus the hard
//! clusterers it builds on, frame induction from SVO triples, and the
//! evaluation measures for both.
//!
//! The core idea: cluster every node's open neighborhood to split the node
//! into senses, connect the senses into a sense graph, hard-cluster that
//! graph, and drop the sense labels. Ambiguous nodes come out in several
//! clusters; everything stays deterministic under a single seed, including
//! parallel runs.
//!
//! ```
//! use watset::clusterers::{ClustererSpec, CwWeighting};
//! use watset::graph::Graph;
//! use watset::watset::{watset, Variant, WatsetSpec};
//!
//! let graph = Graph::builder()
//!     .edge("bank", "riverbank")
//!     .edge("bank", "streambank")
//!     .edge("riverbank", "streambank")
//!     .edge("bank", "bank building")
//!     .edge("bank", "building")
//!     .edge("bank building", "building")
//!     .build();
//!
//! let spec = WatsetSpec::new(
//!     ClustererSpec::chinese_whispers(CwWeighting::Top),
//!     ClustererSpec::chinese_whispers(CwWeighting::Top),
//! )
//! .with_variant(Variant::Simplified)
//! .with_seed(1);
//!
//! let clusters = watset(&graph, &spec);
//! // "bank" belongs to both the waterside and the buildings cluster.
//! assert_eq!(clusters.clusters_with("bank").len(), 2);
//! ```

pub mod clusterers;
pub mod clustering;
pub mod eval;
pub mod graph;
pub mod rng;
pub mod triframes;
pub mod watset;

pub use clusterers::{Algorithm, ClustererSpec, CwWeighting};
pub use clustering::Clustering;
pub use graph::{Graph, GraphStats, NodeId};
pub use watset::{Similarity, Variant, WatsetSpec};
