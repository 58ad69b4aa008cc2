//! Community detection from a distance matrix: zero sets, the partition
//! into zero-distance classes, and residue-pattern verification over class
//! member lists.
//!
//! Because the distance is a metric modulo profile equivalence, distance
//! zero is transitive, so the classes of the partition are exactly the
//! equivalence classes of vertices with identical profiles.

use std::collections::BTreeMap;
use std::io::Write;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hypergraph::VertexId;
use crate::matrix::DistanceMatrix;

/// The vertices whose rows sit at distance zero from an anchor's row,
/// anchor excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSet {
    pub anchor: VertexId,
    pub members: Vec<VertexId>,
}

/// Partition of the vertex set into zero-distance classes. The
/// representative of a class is its least vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityPartition {
    representatives: Vec<VertexId>,
    class_of: BTreeMap<VertexId, VertexId>,
}

impl CommunityPartition {
    /// Representatives in ascending vertex order.
    pub fn representatives(&self) -> &[VertexId] {
        &self.representatives
    }

    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn representative_of(&self, v: VertexId) -> Option<VertexId> {
        self.class_of.get(&v).copied()
    }

    /// Members of the class of `rep`, ascending.
    pub fn members_of(&self, rep: VertexId) -> Vec<VertexId> {
        self.class_of
            .iter()
            .filter(|(_, &r)| r == rep)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Class sizes keyed by representative.
    pub fn class_sizes(&self) -> BTreeMap<VertexId, usize> {
        let mut sizes = BTreeMap::new();
        for rep in self.class_of.values() {
            *sizes.entry(*rep).or_insert(0usize) += 1;
        }
        sizes
    }

    /// CSV export: `vertex,representative`, one row per vertex in
    /// ascending vertex order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "vertex,representative")?;
        for (v, rep) in &self.class_of {
            writeln!(w, "{v},{rep}")?;
        }
        Ok(())
    }
}

/// All vertices `j != anchor` with matrix entry `(anchor, j) = 0`.
pub fn zero_set(matrix: &DistanceMatrix, anchor: VertexId) -> Result<ZeroSet> {
    let i = matrix
        .position_of(anchor)
        .ok_or(Error::VertexNotFound(anchor))?;
    let mut members: Vec<VertexId> = (0..matrix.order())
        .filter(|&j| j != i && matrix.entry(i, j).is_zero())
        .map(|j| matrix.vertex_ids()[j])
        .collect();
    members.sort_unstable();
    Ok(ZeroSet { anchor, members })
}

/// Union-find over the zero entries of the matrix. Transitivity of
/// distance zero is guaranteed by the triangle inequality, so the scan
/// happens per internal row-class rather than per vertex pair.
pub fn partition(matrix: &DistanceMatrix) -> CommunityPartition {
    let n = matrix.order();
    let classes = matrix.class_count();
    let mut uf = UnionFind::new(classes);
    for ci in 0..classes as u32 {
        for cj in (ci + 1)..classes as u32 {
            if matrix.class_distance(ci, cj).is_zero() {
                uf.union(ci as usize, cj as usize);
            }
        }
    }
    // least vertex id per merged class
    let mut least: Vec<Option<VertexId>> = vec![None; classes];
    let mut order: Vec<(VertexId, usize)> = (0..n)
        .map(|i| (matrix.vertex_ids()[i], matrix.class_of_position(i) as usize))
        .collect();
    order.sort_unstable();
    for &(v, c) in &order {
        let root = uf.find(c);
        if least[root].is_none() {
            least[root] = Some(v);
        }
    }
    let mut class_of = BTreeMap::new();
    for &(v, c) in &order {
        class_of.insert(v, least[uf.find(c)].expect("root has a least member"));
    }
    let mut representatives: Vec<VertexId> = least.into_iter().flatten().collect();
    representatives.sort_unstable();
    CommunityPartition {
        representatives,
        class_of,
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
    }
}

/// A named residue predicate over vertex ids.
#[derive(Debug, Clone)]
pub struct ResiduePattern {
    pub name: String,
    pub kind: PatternKind,
}

#[derive(Debug, Clone)]
pub enum PatternKind {
    /// `v mod modulus` lies in `residues`.
    In { modulus: u64, residues: Vec<u64> },
    /// `v mod modulus` avoids `residues`.
    NotIn { modulus: u64, residues: Vec<u64> },
}

impl ResiduePattern {
    pub fn holds_for(&self, v: VertexId) -> bool {
        match &self.kind {
            PatternKind::In { modulus, residues } => residues.contains(&(v.0 % modulus)),
            PatternKind::NotIn { modulus, residues } => !residues.contains(&(v.0 % modulus)),
        }
    }
}

/// The four built-in residue patterns checked against zero-set members:
/// not divisible by 3, not congruent to 2 mod 5, congruent to 1 or 3
/// mod 4, and congruent to 1 mod 7.
pub fn builtin_patterns() -> Vec<ResiduePattern> {
    vec![
        ResiduePattern {
            name: "j != 0 (mod 3)".into(),
            kind: PatternKind::NotIn {
                modulus: 3,
                residues: vec![0],
            },
        },
        ResiduePattern {
            name: "j != 2 (mod 5)".into(),
            kind: PatternKind::NotIn {
                modulus: 5,
                residues: vec![2],
            },
        },
        ResiduePattern {
            name: "j = +-1 (mod 4)".into(),
            kind: PatternKind::In {
                modulus: 4,
                residues: vec![1, 3],
            },
        },
        ResiduePattern {
            name: "j = 1 (mod 7)".into(),
            kind: PatternKind::In {
                modulus: 7,
                residues: vec![1],
            },
        },
    ]
}

/// Whether each pattern holds for every member. Errors on an empty member
/// list.
pub fn check_patterns(
    members: &[VertexId],
    patterns: &[ResiduePattern],
) -> Result<Vec<(String, bool)>> {
    if members.is_empty() {
        return Err(Error::EmptyMemberList);
    }
    Ok(patterns
        .iter()
        .map(|p| {
            let holds = members.iter().all(|&v| p.holds_for(v));
            (p.name.clone(), holds)
        })
        .collect())
}
