//! Uniform access to the two hypergraph representations for pipelines
//! that go from a vertex set to profiles, matrices, and downstream
//! analyses.

use crate::congruence::ImplicitHypergraph;
use crate::error::{Error, Result};
use crate::hypergraph::{ExplicitHypergraph, VertexId};
use crate::profile::CountProfile;

/// Either an implicit congruence hypergraph or an explicit edge list.
#[derive(Debug, Clone)]
pub enum HypergraphSource {
    Implicit(ImplicitHypergraph),
    Explicit(ExplicitHypergraph),
}

impl HypergraphSource {
    pub fn vertices(&self) -> &[VertexId] {
        match self {
            HypergraphSource::Implicit(ih) => ih.vertices(),
            HypergraphSource::Explicit(h) => h.vertices(),
        }
    }

    /// Count profiles of every vertex, in vertex order.
    pub fn profiles(&self) -> Result<Vec<CountProfile>> {
        match self {
            HypergraphSource::Implicit(ih) => Ok(ih.analytic_profiles()),
            HypergraphSource::Explicit(h) => h.count_profiles(),
        }
    }

    /// The sub-hypergraph on the first `n` vertices: congruence families
    /// are rebuilt on the prefix, explicit hypergraphs keep the edges
    /// fully contained in it.
    pub fn prefix(&self, n: usize) -> Result<HypergraphSource> {
        match self {
            HypergraphSource::Implicit(ih) => {
                Ok(HypergraphSource::Implicit(ih.restrict_to_prefix(n)?))
            }
            HypergraphSource::Explicit(h) => {
                if n == 0 || n > h.vertices().len() {
                    return Err(Error::InvalidSpec(format!(
                        "prefix length {n} out of range 1..={}",
                        h.vertices().len()
                    )));
                }
                let vertices: Vec<VertexId> = h.vertices()[..n].to_vec();
                let keep: std::collections::HashSet<VertexId> = vertices.iter().copied().collect();
                let edges: Vec<_> = h
                    .edges()
                    .iter()
                    .filter(|(vs, _)| vs.iter().all(|v| keep.contains(v)))
                    .cloned()
                    .collect();
                Ok(HypergraphSource::Explicit(ExplicitHypergraph::with_context(
                    vertices,
                    edges,
                    h.property_set().to_vec(),
                    h.max_edge_size(),
                )?))
            }
        }
    }
}
