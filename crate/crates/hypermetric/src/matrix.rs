//! Exact pairwise distance matrices over count profiles.
//!
//! Rows are deduplicated internally: vertices whose profiles (or raw
//! rows) coincide share one stored class, so a 5000-vertex matrix with a
//! few hundred distinct profiles stays small while `entry` lookups remain
//! O(1). Entries are exact nonnegative big integers.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::VertexId;
use crate::profile::CountProfile;

/// Symmetric matrix of exact pairwise profile distances with a zero
/// diagonal. Satisfies the triangle inequality whenever it is built from
/// profiles; `from_rows` verifies all three axioms explicitly.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    vertex_index: Vec<VertexId>,
    position: HashMap<VertexId, usize>,
    class_of: Vec<u32>,
    class_count: usize,
    /// Row-major `class_count x class_count` distances between classes.
    class_dist: Vec<BigUint>,
}

impl DistanceMatrix {
    /// Builds the matrix of pairwise distances between the given profiles.
    /// Profiles must share the property set and maximum edge size.
    pub fn from_profiles(profiles: &[CountProfile]) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::NoProfiles);
        }
        for p in &profiles[1..] {
            profiles[0].check_context(p)?;
        }
        // Group equal profiles; distances only need one representative per class.
        let mut class_ids: BTreeMap<_, u32> = BTreeMap::new();
        let mut reps: Vec<&CountProfile> = Vec::new();
        let mut class_of = Vec::with_capacity(profiles.len());
        for p in profiles {
            let next = reps.len() as u32;
            let id = *class_ids.entry(p.counts_key()).or_insert(next);
            if id == next {
                reps.push(p);
            }
            class_of.push(id);
        }
        let c = reps.len();
        let pairs: Vec<(usize, usize)> = (0..c)
            .flat_map(|i| ((i + 1)..c).map(move |j| (i, j)))
            .collect();
        let computed: Vec<BigUint> = pairs
            .par_iter()
            .map(|&(i, j)| reps[i].distance_unchecked(reps[j]))
            .collect();
        let mut class_dist = vec![BigUint::zero(); c * c];
        for (&(i, j), d) in pairs.iter().zip(computed) {
            class_dist[i * c + j] = d.clone();
            class_dist[j * c + i] = d;
        }
        let vertex_index: Vec<VertexId> = profiles.iter().map(|p| p.owner()).collect();
        let position = index_positions(&vertex_index)?;
        Ok(DistanceMatrix {
            vertex_index,
            position,
            class_of,
            class_count: c,
            class_dist,
        })
    }

    /// Builds a matrix from explicit rows, verifying symmetry, the zero
    /// diagonal, and the triangle inequality.
    pub fn from_rows(vertex_index: Vec<VertexId>, rows: Vec<Vec<BigUint>>) -> Result<Self> {
        let n = vertex_index.len();
        if n == 0 {
            return Err(Error::NoProfiles);
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MatrixRagged);
        }
        for i in 0..n {
            if !rows[i][i].is_zero() {
                return Err(Error::MatrixNonzeroDiagonal(i));
            }
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::MatrixNotSymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if rows[i][j] > &rows[i][k] + &rows[k][j] {
                        return Err(Error::MatrixTriangleViolation(i, j, k));
                    }
                }
            }
        }
        // Deduplicate identical rows.
        let mut class_ids: BTreeMap<&Vec<BigUint>, u32> = BTreeMap::new();
        let mut rep_pos: Vec<usize> = Vec::new();
        let mut class_of = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let next = rep_pos.len() as u32;
            let id = *class_ids.entry(row).or_insert(next);
            if id == next {
                rep_pos.push(i);
            }
            class_of.push(id);
        }
        let c = rep_pos.len();
        let mut class_dist = vec![BigUint::zero(); c * c];
        for i in 0..c {
            for j in 0..c {
                class_dist[i * c + j] = rows[rep_pos[i]][rep_pos[j]].clone();
            }
        }
        let position = index_positions(&vertex_index)?;
        Ok(DistanceMatrix {
            vertex_index,
            position,
            class_of,
            class_count: c,
            class_dist,
        })
    }

    pub fn order(&self) -> usize {
        self.vertex_index.len()
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.vertex_index
    }

    pub fn position_of(&self, v: VertexId) -> Option<usize> {
        self.position.get(&v).copied()
    }

    /// Distance between the vertices at positions `i` and `j`.
    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        let ci = self.class_of[i] as usize;
        let cj = self.class_of[j] as usize;
        &self.class_dist[ci * self.class_count + cj]
    }

    pub fn entry_by_id(&self, a: VertexId, b: VertexId) -> Result<&BigUint> {
        let i = self.position_of(a).ok_or(Error::VertexNotFound(a))?;
        let j = self.position_of(b).ok_or(Error::VertexNotFound(b))?;
        Ok(self.entry(i, j))
    }

    /// Internal class id of a vertex position. Two positions share a class
    /// exactly when their whole rows coincide.
    pub(crate) fn class_of_position(&self, i: usize) -> u32 {
        self.class_of[i]
    }

    pub(crate) fn class_count(&self) -> usize {
        self.class_count
    }

    pub(crate) fn class_distance(&self, ci: u32, cj: u32) -> &BigUint {
        &self.class_dist[ci as usize * self.class_count + cj as usize]
    }

    /// CSV export: first row lists the vertex ids, then one row of exact
    /// integers per vertex.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.order();
        let header: Vec<String> = self.vertex_index.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", header.join(","))?;
        let mut line = String::new();
        for i in 0..n {
            line.clear();
            for j in 0..n {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&self.entry(i, j).to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn index_positions(ids: &[VertexId]) -> Result<HashMap<VertexId, usize>> {
    let mut position = HashMap::with_capacity(ids.len());
    for (i, v) in ids.iter().enumerate() {
        if position.insert(*v, i).is_some() {
            return Err(Error::DuplicateVertex(*v));
        }
    }
    Ok(position)
}

/// CSV export of profiles: `vertex,size,property,count`, nonzero entries
/// only, ordered by (vertex position, size, property).
pub fn write_profiles_csv<W: Write>(profiles: &[CountProfile], mut w: W) -> Result<()> {
    writeln!(w, "vertex,size,property,count")?;
    for p in profiles {
        for ((size, label), count) in p.entries() {
            writeln!(w, "{},{},{},{}", p.owner(), size, label, count)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::PropertyLabel;

    fn profile(owner: u64, entries: &[(usize, &str, u64)]) -> CountProfile {
        let labels: Vec<PropertyLabel> = vec!["p0".into(), "p1".into()];
        let mut p = CountProfile::empty(VertexId(owner), labels, 9);
        for &(size, label, count) in entries {
            p.add(size, label.into(), count);
        }
        p
    }

    #[test]
    fn single_profile_gives_zero_matrix() {
        let m = DistanceMatrix::from_profiles(&[profile(1, &[(2, "p0", 4)])]).unwrap();
        assert_eq!(m.order(), 1);
        assert!(m.entry(0, 0).is_zero());
    }

    #[test]
    fn equivalent_profiles_give_zero_entries() {
        let m = DistanceMatrix::from_profiles(&[
            profile(1, &[(2, "p0", 4)]),
            profile(2, &[(2, "p0", 4)]),
        ])
        .unwrap();
        assert!(m.entry(0, 1).is_zero());
        assert!(m.entry(1, 0).is_zero());
    }

    #[test]
    fn empty_profile_list_errors() {
        assert!(matches!(
            DistanceMatrix::from_profiles(&[]),
            Err(Error::NoProfiles)
        ));
    }

    #[test]
    fn entries_match_pairwise_distances() {
        let ps = vec![
            profile(1, &[(2, "p0", 3)]),
            profile(2, &[(2, "p0", 5), (3, "p1", 1)]),
            profile(3, &[]),
        ];
        let m = DistanceMatrix::from_profiles(&ps).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(*m.entry(i, j), ps[i].distance(&ps[j]).unwrap());
            }
        }
    }

    #[test]
    fn from_rows_checks_symmetry() {
        let rows = vec![
            vec![BigUint::from(0u32), BigUint::from(1u32)],
            vec![BigUint::from(2u32), BigUint::from(0u32)],
        ];
        assert!(matches!(
            DistanceMatrix::from_rows(vec![VertexId(1), VertexId(2)], rows),
            Err(Error::MatrixNotSymmetric(0, 1))
        ));
    }

    #[test]
    fn from_rows_checks_triangle() {
        let rows: Vec<Vec<BigUint>> = [[0u32, 1, 9], [1, 0, 1], [9, 1, 0]]
            .iter()
            .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
            .collect();
        let ids = vec![VertexId(1), VertexId(2), VertexId(3)];
        assert!(matches!(
            DistanceMatrix::from_rows(ids, rows),
            Err(Error::MatrixTriangleViolation(..))
        ));
    }

    #[test]
    fn csv_shape() {
        let m = DistanceMatrix::from_profiles(&[
            profile(7, &[(2, "p0", 3)]),
            profile(9, &[(2, "p0", 5)]),
        ])
        .unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "7,9\n0,2\n2,0\n");
    }
}
