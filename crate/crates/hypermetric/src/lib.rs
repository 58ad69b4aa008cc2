//! Metric-space analytics for property-labeled hypergraphs.
//!
//! The crate equips a hypergraph whose hyperedges carry labels with an
//! exact integer distance between vertex neighborhoods: each neighborhood
//! is summarized by the counts of contained hyperedges per (size, label),
//! and the distance is the L1 difference of those count profiles. The
//! distance is a metric modulo profile equivalence, which supports three
//! analyses:
//!
//! - community detection as zero-distance classes of the distance matrix,
//! - Vietoris-Rips persistent homology (dimensions 0 and 1) over the
//!   quotient metric space, with barcode export,
//! - modified nearest-neighbor sign prediction with a repeated-split
//!   experiment harness.
//!
//! Congruence hypergraph generators produce test families whose
//! neighborhoods and profiles are computed analytically, at scales where
//! enumerating hyperedges is infeasible.

pub mod community;
pub mod congruence;
pub mod error;
pub mod hypergraph;
pub mod knn;
pub mod matrix;
pub mod persistence;
pub mod pipeline;
pub mod profile;

pub use error::{Error, Result};
pub use hypergraph::{ExplicitHypergraph, PropertyLabel, VertexId};
pub use matrix::DistanceMatrix;
pub use profile::CountProfile;
