//! Shortest-path occupancy analysis for social graphs.
//!
//! The pipeline loads an edge list into a compressed adjacency structure,
//! runs single-source shortest paths from every (or a sampled set of)
//! source vertices, stores every shortest path as a transaction, and mines
//! the resulting transaction database for frequent vertex sets (FP-Growth)
//! and consecutive vertex windows (n-grams). The report joins those counts
//! with vertex degree and clustering structure.
//!
//! Edge weights are generic over [`Weight`]; the aliases below cover the
//! common cases. Statistics that are ratios of counts ([`graph::clustering`])
//! are generic over the output scalar, so exact rational results are
//! available where floating point would hide equality.

pub mod error;
pub mod fpgrowth;
pub mod graph;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod transactions;
pub mod traversal;

pub use error::{Error, Result};
pub use scalar::Weight;

/// Vertex identifier. Ids are dense and 0-based.
pub type VertexId = u32;

/// Graph with real-valued weights; the default for loaded edge lists.
pub type Graph = graph::CsrGraph<f64>;
/// Single-precision weighted graph.
pub type GraphF32 = graph::CsrGraph<f32>;
/// Integer-weighted graph; distances are exact.
pub type IntGraph = graph::CsrGraph<u64>;
/// Rational-weighted graph; distances are exact.
pub type RationalGraph = graph::CsrGraph<num_rational::Ratio<i64>>;

pub type SsspResult = traversal::SsspResult<f64>;
pub type IntSsspResult = traversal::SsspResult<u64>;

/// Clustering statistics in floating point.
pub type ClusteringStats = graph::ClusteringStats<f64>;
/// Clustering statistics as exact fractions.
pub type ExactClusteringStats = graph::ClusteringStats<num_rational::Ratio<i64>>;
