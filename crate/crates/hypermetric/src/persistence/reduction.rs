//! Boundary-matrix reduction over the two-element field for Vietoris-Rips
//! filtrations up to dimension 1.
//!
//! Simplices (vertices, edges, and triangles when dimension 1 is
//! requested) are ordered by filtration value, then dimension, then
//! vertex tuple; filtration values are indices into the sorted list of
//! distinct pairwise distances, so comparisons are exact. The standard
//! column reduction pairs each destroyer with its creator; unpaired
//! creators yield infinite intervals.

use num_bigint::BigUint;
use num_traits::Zero;

/// One persistence pair expressed over filtration values: `death` is
/// `None` for essential classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInterval {
    pub dim: u8,
    pub birth: BigUint,
    pub death: Option<BigUint>,
}

/// Runs VR persistence over an `n x n` exact distance lookup.
/// Zero-persistence pairs (birth equal to death) are dropped.
pub fn vr_intervals(n: usize, dist: &dyn Fn(usize, usize) -> BigUint, max_dim: usize) -> Vec<RawInterval> {
    // distinct distance values, ascending; filtration index 0 is distance 0
    let mut values: Vec<BigUint> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            values.push(dist(i, j));
        }
    }
    values.push(BigUint::zero());
    values.sort();
    values.dedup();
    let value_index = |v: &BigUint| -> u32 {
        values.binary_search(v).expect("distance is a grid value") as u32
    };

    #[derive(Clone)]
    struct Simplex {
        filt: u32,
        verts: [u32; 3],
        dim: u8,
    }
    let mut simplices: Vec<Simplex> = Vec::new();
    for v in 0..n as u32 {
        simplices.push(Simplex {
            filt: 0,
            verts: [v, 0, 0],
            dim: 0,
        });
    }
    let mut edge_filts = vec![0u32; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let f = value_index(&dist(i, j));
            edge_filts[i * n + j] = f;
            simplices.push(Simplex {
                filt: f,
                verts: [i as u32, j as u32, 0],
                dim: 1,
            });
        }
    }
    if max_dim >= 1 {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let f = edge_filts[i * n + j]
                        .max(edge_filts[i * n + k])
                        .max(edge_filts[j * n + k]);
                    simplices.push(Simplex {
                        filt: f,
                        verts: [i as u32, j as u32, k as u32],
                        dim: 2,
                    });
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        (a.filt, a.dim, &a.verts[..=a.dim as usize])
            .cmp(&(b.filt, b.dim, &b.verts[..=b.dim as usize]))
    });

    // index lookups for boundary construction
    let mut vertex_ids = vec![0u32; n];
    let mut edge_ids = vec![0u32; n * n];
    for (idx, s) in simplices.iter().enumerate() {
        match s.dim {
            0 => vertex_ids[s.verts[0] as usize] = idx as u32,
            1 => edge_ids[s.verts[0] as usize * n + s.verts[1] as usize] = idx as u32,
            _ => {}
        }
    }

    // column reduction with XOR of sorted sparse columns
    let total = simplices.len();
    let mut low_owner: Vec<u32> = vec![u32::MAX; total];
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(total);
    let mut paired = vec![false; total];
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (j, s) in simplices.iter().enumerate() {
        let mut col: Vec<u32> = match s.dim {
            0 => Vec::new(),
            1 => {
                let mut b = vec![
                    vertex_ids[s.verts[0] as usize],
                    vertex_ids[s.verts[1] as usize],
                ];
                b.sort_unstable();
                b
            }
            _ => {
                let (a, b, c) = (s.verts[0] as usize, s.verts[1] as usize, s.verts[2] as usize);
                let mut bd = vec![
                    edge_ids[a * n + b],
                    edge_ids[a * n + c],
                    edge_ids[b * n + c],
                ];
                bd.sort_unstable();
                bd
            }
        };
        while let Some(&low) = col.last() {
            let owner = low_owner[low as usize];
            if owner == u32::MAX {
                break;
            }
            col = xor_sorted(&col, &columns[owner as usize]);
        }
        if let Some(&low) = col.last() {
            low_owner[low as usize] = j as u32;
            paired[low as usize] = true;
            paired[j] = true;
            pairs.push((low, j as u32));
        }
        columns.push(col);
    }

    let mut out = Vec::new();
    for (creator, destroyer) in pairs {
        let s = &simplices[creator as usize];
        let d = &simplices[destroyer as usize];
        if s.dim as usize > max_dim {
            continue;
        }
        if s.filt != d.filt {
            out.push(RawInterval {
                dim: s.dim,
                birth: values[s.filt as usize].clone(),
                death: Some(values[d.filt as usize].clone()),
            });
        }
    }
    for (idx, s) in simplices.iter().enumerate() {
        if !paired[idx] && (s.dim as usize) <= max_dim {
            // triangles are only destroyers; an unpaired edge can appear
            // when max_dim is 0 and triangles were not generated
            if s.dim == 1 && max_dim == 0 {
                continue;
            }
            out.push(RawInterval {
                dim: s.dim,
                birth: values[s.filt as usize].clone(),
                death: None,
            });
        }
    }
    out.sort_by(|a, b| {
        (a.dim, &a.birth, a.death.is_none(), &a.death).cmp(&(
            b.dim,
            &b.birth,
            b.death.is_none(),
            &b.death,
        ))
    });
    out
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Kruskal minimum spanning tree over the same distance lookup; returns
/// the sorted multiset of MST edge weights. Used for dimension-0 deaths.
pub fn mst_edge_weights(n: usize, dist: &dyn Fn(usize, usize) -> BigUint) -> Vec<BigUint> {
    let mut edges: Vec<(BigUint, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((dist(i, j), i, j));
        }
    }
    edges.sort();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut weights = Vec::with_capacity(n.saturating_sub(1));
    for (w, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            weights.push(w);
            if weights.len() + 1 == n {
                break;
            }
        }
    }
    weights.sort();
    weights
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d<'a>(matrix: &'a [&'a [u64]]) -> impl Fn(usize, usize) -> BigUint + 'a {
        move |i, j| BigUint::from(matrix[i][j])
    }

    #[test]
    fn single_point() {
        let m: &[&[u64]] = &[&[0]];
        let bars = vr_intervals(1, &d(m), 1);
        assert_eq!(bars.len(), 1);
        assert_eq!(bars[0].dim, 0);
        assert_eq!(bars[0].death, None);
    }

    #[test]
    fn regular_simplex_has_no_loops() {
        let m: &[&[u64]] = &[
            &[0, 1, 1, 1],
            &[1, 0, 1, 1],
            &[1, 1, 0, 1],
            &[1, 1, 1, 0],
        ];
        let bars = vr_intervals(4, &d(m), 1);
        let d0: Vec<_> = bars.iter().filter(|b| b.dim == 0).collect();
        let d1: Vec<_> = bars.iter().filter(|b| b.dim == 1).collect();
        assert_eq!(d0.len(), 4);
        assert_eq!(d0.iter().filter(|b| b.death.is_none()).count(), 1);
        assert!(d0
            .iter()
            .filter_map(|b| b.death.as_ref())
            .all(|w| *w == BigUint::from(1u32)));
        assert!(d1.is_empty());
    }

    #[test]
    fn square_has_one_loop() {
        let m: &[&[u64]] = &[
            &[0, 1, 2, 1],
            &[1, 0, 1, 2],
            &[2, 1, 0, 1],
            &[1, 2, 1, 0],
        ];
        let bars = vr_intervals(4, &d(m), 1);
        let d1: Vec<_> = bars.iter().filter(|b| b.dim == 1).collect();
        assert_eq!(d1.len(), 1);
        assert_eq!(d1[0].birth, BigUint::from(1u32));
        assert_eq!(d1[0].death, Some(BigUint::from(2u32)));
    }

    #[test]
    fn mst_weights_match_dim0_deaths() {
        let m: &[&[u64]] = &[
            &[0, 3, 5, 9],
            &[3, 0, 4, 7],
            &[5, 4, 0, 6],
            &[9, 7, 6, 0],
        ];
        let bars = vr_intervals(4, &d(m), 0);
        let mut deaths: Vec<BigUint> = bars
            .iter()
            .filter(|b| b.dim == 0)
            .filter_map(|b| b.death.clone())
            .collect();
        deaths.sort();
        assert_eq!(deaths, mst_edge_weights(4, &d(m)));
    }
}
