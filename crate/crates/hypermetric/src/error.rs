use num_bigint::BigUint;

use crate::hypergraph::VertexId;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vertex not in hypergraph: {0}")]
    VertexNotFound(VertexId),

    #[error("hyperedge contains a duplicated vertex: {0}")]
    DuplicateVertexInEdge(VertexId),

    #[error("duplicate hyperedge over vertices {0:?}")]
    DuplicateHyperedge(Vec<VertexId>),

    #[error("hyperedge vertex {0} is not in the declared vertex set")]
    EdgeVertexUndeclared(VertexId),

    #[error("hyperedge of size {size} exceeds the maximum edge size {max}")]
    EdgeTooLarge { size: usize, max: usize },

    #[error("hyperedge must contain at least one vertex")]
    EmptyEdge,

    #[error("hyperedge label {0:?} is not in the declared property set")]
    UnknownLabel(String),

    #[error("duplicate vertex {0} in vertex list")]
    DuplicateVertex(VertexId),

    #[error("profiles have mismatched property sets")]
    PropertySetMismatch,

    #[error("profiles have mismatched maximum edge sizes ({0} vs {1})")]
    MaxSizeMismatch(usize, usize),

    #[error("no profiles")]
    NoProfiles,

    #[error("distance matrix is not symmetric at ({0}, {1})")]
    MatrixNotSymmetric(usize, usize),

    #[error("distance matrix has a nonzero diagonal entry at {0}")]
    MatrixNonzeroDiagonal(usize),

    #[error("distance matrix rows have inconsistent lengths")]
    MatrixRagged,

    #[error("distance matrix violates the triangle inequality at ({0}, {1}, {2})")]
    MatrixTriangleViolation(usize, usize, usize),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("enumeration infeasible: {edges} edges > cap {cap}")]
    EnumerationInfeasible { edges: BigUint, cap: u64 },

    #[error("empty member list")]
    EmptyMemberList,

    #[error("empty metric space")]
    EmptySpace,

    #[error("filtration cutoffs must be strictly increasing and within the vertex count (got {0:?} for {1} vertices)")]
    InvalidFiltration(Vec<usize>, usize),

    #[error("training set of size {train} is smaller than k = {k}")]
    TrainTooSmall { train: usize, k: usize },

    #[error("empty neighbor list")]
    EmptyNeighborList,

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidExperiment(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
