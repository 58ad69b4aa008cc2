//! Property-labeled hypergraphs with explicitly materialized hyperedges.
//!
//! An explicit hypergraph holds every hyperedge in memory. It is the
//! brute-force substrate that the analytic congruence generators are
//! checked against, and the carrier for the line-oriented text format.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::CountProfile;

/// Identifier of a vertex. In the congruence families the id is the
/// integer value of the vertex itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

/// Label attached to a hyperedge, drawn from a finite declared property set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PropertyLabel(String);

impl PropertyLabel {
    pub fn new(token: impl Into<String>) -> Self {
        PropertyLabel(token.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PropertyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<&str> for PropertyLabel {
    fn from(s: &str) -> Self {
        PropertyLabel(s.to_owned())
    }
}

/// A finite vertex set together with a list of labeled hyperedges.
///
/// Invariants enforced on construction: vertices are unique, every
/// hyperedge is a nonempty subset of the vertex set without repeated
/// vertices, no two hyperedges share the same vertex set, edge sizes do
/// not exceed `max_edge_size`, and every label belongs to the property
/// set.
#[derive(Debug, Clone)]
pub struct ExplicitHypergraph {
    vertices: Vec<VertexId>,
    position: HashMap<VertexId, usize>,
    edges: Vec<(Vec<VertexId>, PropertyLabel)>,
    property_set: Vec<PropertyLabel>,
    max_edge_size: usize,
}

impl ExplicitHypergraph {
    /// Builds a hypergraph, deriving the property set (in order of first
    /// appearance) and the maximum edge size from the edges themselves.
    pub fn new(vertices: Vec<VertexId>, edges: Vec<(Vec<VertexId>, PropertyLabel)>) -> Result<Self> {
        let mut property_set = Vec::new();
        let mut max = 1;
        for (vs, label) in &edges {
            if !property_set.contains(label) {
                property_set.push(label.clone());
            }
            max = max.max(vs.len());
        }
        Self::with_context(vertices, edges, property_set, max)
    }

    /// Builds a hypergraph against an externally declared property set and
    /// maximum edge size. Needed when an enumerated instance must stay
    /// profile-comparable with its analytic counterpart even if some sizes
    /// or labels happen not to occur.
    pub fn with_context(
        vertices: Vec<VertexId>,
        edges: Vec<(Vec<VertexId>, PropertyLabel)>,
        property_set: Vec<PropertyLabel>,
        max_edge_size: usize,
    ) -> Result<Self> {
        let mut position = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if position.insert(*v, i).is_some() {
                return Err(Error::DuplicateVertex(*v));
            }
        }
        let mut seen: HashSet<Vec<VertexId>> = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for (vs, label) in edges {
            if vs.is_empty() {
                return Err(Error::EmptyEdge);
            }
            if vs.len() > max_edge_size {
                return Err(Error::EdgeTooLarge {
                    size: vs.len(),
                    max: max_edge_size,
                });
            }
            if !property_set.contains(&label) {
                return Err(Error::UnknownLabel(label.as_str().to_owned()));
            }
            let mut sorted = vs;
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateVertexInEdge(w[0]));
                }
            }
            for v in &sorted {
                if !position.contains_key(v) {
                    return Err(Error::EdgeVertexUndeclared(*v));
                }
            }
            if !seen.insert(sorted.clone()) {
                return Err(Error::DuplicateHyperedge(sorted));
            }
            normalized.push((sorted, label));
        }
        Ok(ExplicitHypergraph {
            vertices,
            position,
            edges: normalized,
            property_set,
            max_edge_size,
        })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(Vec<VertexId>, PropertyLabel)] {
        &self.edges
    }

    pub fn property_set(&self) -> &[PropertyLabel] {
        &self.property_set
    }

    pub fn max_edge_size(&self) -> usize {
        self.max_edge_size
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.position.contains_key(&v)
    }

    /// The neighborhood of `a`: the vertex itself plus every vertex that
    /// co-appears with it in some hyperedge.
    pub fn neighborhood(&self, a: VertexId) -> Result<BTreeSet<VertexId>> {
        if !self.contains_vertex(a) {
            return Err(Error::VertexNotFound(a));
        }
        let mut out = BTreeSet::new();
        out.insert(a);
        for (vs, _) in &self.edges {
            if vs.binary_search(&a).is_ok() {
                out.extend(vs.iter().copied());
            }
        }
        Ok(out)
    }

    /// Counts, per (size, label), the hyperedges whose vertex set is fully
    /// contained in the neighborhood of `a`.
    pub fn count_profile(&self, a: VertexId) -> Result<CountProfile> {
        let nb = self.neighborhood(a)?;
        let mut profile = CountProfile::empty(a, self.property_set.clone(), self.max_edge_size);
        for (vs, label) in &self.edges {
            if vs.iter().all(|v| nb.contains(v)) {
                profile.add(vs.len(), label.clone(), 1u32);
            }
        }
        Ok(profile)
    }

    /// Profiles of every vertex, in vertex order.
    pub fn count_profiles(&self) -> Result<Vec<CountProfile>> {
        self.vertices.iter().map(|&v| self.count_profile(v)).collect()
    }

    /// Total labeled edge count per (size, label).
    pub fn edge_counts(&self) -> Vec<((usize, PropertyLabel), BigUint)> {
        let mut counts: HashMap<(usize, PropertyLabel), u64> = HashMap::new();
        for (vs, label) in &self.edges {
            *counts.entry((vs.len(), label.clone())).or_default() += 1;
        }
        let mut out: Vec<_> = counts
            .into_iter()
            .map(|(k, v)| (k, BigUint::from(v)))
            .collect();
        out.sort();
        out
    }

    /// Parses the line-oriented text format:
    ///
    /// ```text
    /// # comment
    /// vertices 1 2 3
    /// edge <label> <v1> <v2> ... <vk>
    /// ```
    ///
    /// Vertices are ordered by declaration, then by first appearance in an
    /// edge. Labels keep their order of first appearance.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut vertices: Vec<VertexId> = Vec::new();
        let mut known: HashSet<VertexId> = HashSet::new();
        let mut edges: Vec<(Vec<VertexId>, PropertyLabel)> = Vec::new();
        let mut declare = |v: VertexId, vertices: &mut Vec<VertexId>| {
            if known.insert(v) {
                vertices.push(v);
            }
        };
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().expect("nonempty line has a token");
            let parse_vertex = |tok: &str| -> Result<VertexId> {
                tok.parse::<u64>().map(VertexId).map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid vertex id {tok:?}"),
                })
            };
            match head {
                "vertices" => {
                    for tok in tokens {
                        declare(parse_vertex(tok)?, &mut vertices);
                    }
                }
                "edge" => {
                    let label = tokens.next().ok_or_else(|| Error::Parse {
                        line: lineno,
                        message: "edge line is missing a label".into(),
                    })?;
                    let mut vs = Vec::new();
                    for tok in tokens {
                        let v = parse_vertex(tok)?;
                        declare(v, &mut vertices);
                        vs.push(v);
                    }
                    if vs.is_empty() {
                        return Err(Error::Parse {
                            line: lineno,
                            message: "edge line has no vertices".into(),
                        });
                    }
                    edges.push((vs, PropertyLabel::new(label)));
                }
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("unknown record {other:?}"),
                    });
                }
            }
        }
        Self::new(vertices, edges)
    }

    /// Writes the text format accepted by [`ExplicitHypergraph::parse`].
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "vertices")?;
        for v in &self.vertices {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
        for (vs, label) in &self.edges {
            write!(w, "edge {label}")?;
            for v in vs {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
