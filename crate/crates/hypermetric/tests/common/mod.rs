//! Shared helpers for integration tests: random exact metric generators,
//! an exhaustive persistent-homology oracle over the two-element field,
//! and an independent (Prim) minimum spanning tree.

#![allow(dead_code)]

use num_bigint::BigUint;
use rand::Rng;

/// Random integer metric on `n` points: random positive symmetric entries
/// repaired into a metric by min-plus (Floyd-Warshall) closure. All
/// off-diagonal distances stay positive, so points are pairwise distinct.
pub fn random_metric(rng: &mut impl Rng, n: usize, max_val: u64) -> Vec<Vec<u64>> {
    let mut d = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(1..=max_val.max(1));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].saturating_add(d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Random pseudo-metric with duplicated points: a base metric on
/// `n_base` points expanded to `n_base + extra` rows by repeating
/// randomly chosen points (distance zero within a repeated group).
pub fn random_metric_with_duplicates(
    rng: &mut impl Rng,
    n_base: usize,
    extra: usize,
    max_val: u64,
) -> Vec<Vec<u64>> {
    let base = random_metric(rng, n_base, max_val);
    let mut owner: Vec<usize> = (0..n_base).collect();
    for _ in 0..extra {
        owner.push(rng.gen_range(0..n_base));
    }
    let n = owner.len();
    let mut d = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = base[owner[i]][owner[j]];
        }
    }
    d
}

/// Random integer point cloud in Z^3 under the L1 distance; coincident
/// points yield genuine zero distances.
pub fn random_l1_cloud(rng: &mut impl Rng, n: usize, coord_max: u64) -> Vec<Vec<u64>> {
    let pts: Vec<[i64; 3]> = (0..n)
        .map(|_| {
            [
                rng.gen_range(0..=coord_max as i64),
                rng.gen_range(0..=coord_max as i64),
                rng.gen_range(0..=coord_max as i64),
            ]
        })
        .collect();
    let mut d = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = pts[i]
                .iter()
                .zip(&pts[j])
                .map(|(a, b)| a.abs_diff(*b))
                .sum();
        }
    }
    d
}

/// Prim's minimum spanning tree; returns the sorted edge weights.
/// Independent of the Kruskal-based path used by the barcode computation.
pub fn prim_mst_weights(d: &[Vec<u64>]) -> Vec<u64> {
    let n = d.len();
    if n == 0 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![u64::MAX; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = d[0][j];
    }
    let mut weights = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut pick = usize::MAX;
        for j in 0..n {
            if !in_tree[j] && (pick == usize::MAX || best[j] < best[pick]) {
                pick = j;
            }
        }
        weights.push(best[pick]);
        in_tree[pick] = true;
        for j in 0..n {
            if !in_tree[j] && d[pick][j] < best[j] {
                best[j] = d[pick][j];
            }
        }
    }
    weights.sort_unstable();
    weights
}

/// An interval as (dimension, birth, death); `None` death is infinite.
pub type OracleInterval = (u8, u64, Option<u64>);

/// Exhaustive persistence oracle for metric spaces with at most seven
/// points: persistent Betti numbers in dimensions 0 and 1 are computed at
/// every pair of critical scales from cycle/boundary subspace ranks over
/// the two-element field, and interval multiplicities follow by
/// inclusion-exclusion. Completely independent of the boundary-reduction
/// pairing algorithm.
pub fn bruteforce_intervals(d: &[Vec<u64>]) -> Vec<OracleInterval> {
    let n = d.len();
    assert!(n <= 7, "oracle is exhaustive; keep it tiny");
    // critical grid: 0 plus all pairwise distances
    let mut grid: Vec<u64> = vec![0];
    for i in 0..n {
        for j in (i + 1)..n {
            grid.push(d[i][j]);
        }
    }
    grid.sort_unstable();
    grid.dedup();

    // global simplex tables
    let mut edges = Vec::new(); // (i, j, filt)
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j, d[i][j]));
        }
    }
    let edge_index = |a: usize, b: usize| -> usize {
        edges
            .iter()
            .position(|&(i, j, _)| (i, j) == (a.min(b), a.max(b)))
            .unwrap()
    };
    let mut triangles = Vec::new(); // (i, j, k, filt)
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let f = d[i][j].max(d[i][k]).max(d[j][k]);
                triangles.push((i, j, k, f));
            }
        }
    }

    // Z_0(s): kernel of the zero map = all of C_0(s) = span of vertices
    // Z_1(s): kernel of edge boundary restricted to edges with filt <= s
    // B_0(t): image of edge boundary at t; B_1(t): image of triangle boundary
    let z0_basis = |_s: u64| -> Vec<u64> { (0..n).map(|v| 1u64 << v).collect() };
    let z1_basis = |s: u64| -> Vec<u64> {
        // eliminate boundary columns, tracking combinations
        let mut pivots: Vec<(u64, u64)> = Vec::new(); // (boundary vector over vertices, combination over edges)
        let mut kernel = Vec::new();
        for (e, &(i, j, f)) in edges.iter().enumerate() {
            if f > s {
                continue;
            }
            let mut b = (1u64 << i) | (1u64 << j);
            let mut c = 1u64 << e;
            loop {
                if b == 0 {
                    kernel.push(c);
                    break;
                }
                let high = 63 - b.leading_zeros();
                match pivots
                    .iter()
                    .find(|(pb, _)| 63 - pb.leading_zeros() == high)
                {
                    Some(&(pb, pc)) => {
                        b ^= pb;
                        c ^= pc;
                    }
                    None => {
                        pivots.push((b, c));
                        break;
                    }
                }
            }
        }
        kernel
    };
    let b0_gens = |t: u64| -> Vec<u64> {
        edges
            .iter()
            .filter(|&&(_, _, f)| f <= t)
            .map(|&(i, j, _)| (1u64 << i) | (1u64 << j))
            .collect()
    };
    let b1_gens = |t: u64| -> Vec<u64> {
        triangles
            .iter()
            .filter(|&&(_, _, _, f)| f <= t)
            .map(|&(i, j, k, _)| {
                (1u64 << edge_index(i, j)) | (1u64 << edge_index(i, k)) | (1u64 << edge_index(j, k))
            })
            .collect()
    };

    fn rank(vs: &[u64]) -> usize {
        let mut pivots: Vec<u64> = Vec::new();
        for &v in vs {
            let mut v = v;
            while v != 0 {
                let high = 63 - v.leading_zeros();
                match pivots.iter().find(|p| 63 - p.leading_zeros() == high) {
                    Some(&p) => v ^= p,
                    None => {
                        pivots.push(v);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }

    // persistent Betti at grid indices (s, t)
    let betti = |dim: u8, s: usize, t: usize| -> i64 {
        let (z, b): (Vec<u64>, Vec<u64>) = match dim {
            0 => (z0_basis(grid[s]), b0_gens(grid[t])),
            _ => (z1_basis(grid[s]), b1_gens(grid[t])),
        };
        let rz = rank(&z) as i64;
        let rb = rank(&b) as i64;
        let mut both = z.clone();
        both.extend_from_slice(&b);
        let rzb = rank(&both) as i64;
        rz - (rz + rb - rzb)
    };

    let m = grid.len();
    let mut out = Vec::new();
    for dim in 0u8..=1 {
        let beta: Vec<Vec<i64>> = (0..m)
            .map(|s| (0..m).map(|t| if t >= s { betti(dim, s, t) } else { 0 }).collect())
            .collect();
        for s in 0..m {
            let prev = |x: usize, y: usize| -> i64 {
                if x == usize::MAX {
                    0
                } else {
                    beta[x][y]
                }
            };
            let sm1 = s.checked_sub(1).unwrap_or(usize::MAX);
            for t in (s + 1)..m {
                let mult =
                    (beta[s][t - 1] - beta[s][t]) - (prev(sm1, t - 1) - prev(sm1, t));
                for _ in 0..mult {
                    out.push((dim, grid[s], Some(grid[t])));
                }
            }
            let inf = beta[s][m - 1] - prev(sm1, m - 1);
            for _ in 0..inf {
                out.push((dim, grid[s], None));
            }
        }
    }
    out.sort_by(|a, b| {
        (a.0, a.1, a.2.is_none(), a.2).cmp(&(b.0, b.1, b.2.is_none(), b.2))
    });
    out
}

/// Converts a barcode from the crate into the oracle interval shape.
pub fn barcode_to_intervals(b: &hypermetric::persistence::Barcode) -> Vec<OracleInterval> {
    let mut out: Vec<OracleInterval> = b
        .intervals
        .iter()
        .map(|iv| {
            let birth = biguint_u64(&iv.birth);
            let death = iv.death.as_ref().map(biguint_u64);
            (iv.dim, birth, death)
        })
        .collect();
    out.sort_by(|a, b| (a.0, a.1, a.2.is_none(), a.2).cmp(&(b.0, b.1, b.2.is_none(), b.2)));
    out
}

pub fn biguint_u64(v: &BigUint) -> u64 {
    let digits = v.to_u64_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0],
        _ => panic!("value exceeds u64"),
    }
}

pub fn rows_to_big(rows: &[Vec<u64>]) -> Vec<Vec<BigUint>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
        .collect()
}
