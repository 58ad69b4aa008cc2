//! Analytic operations on implicit congruence hypergraphs: closed-form
//! neighborhoods, count profiles via binomial and product counting, exact
//! whole-graph edge counts, and a capped enumerator used as an oracle.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{ExplicitHypergraph, PropertyLabel, VertexId};
use crate::profile::CountProfile;

use super::{ImplicitHypergraph, SizeLayer};

/// Exact hyperedge counts of an implicit hypergraph, total and per
/// (size, label).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCountSummary {
    pub total: BigUint,
    pub by_size_label: BTreeMap<(usize, PropertyLabel), BigUint>,
}

impl ImplicitHypergraph {
    /// Closed-form neighborhood: `b` is adjacent to `a` when some size
    /// stratum lets an edge contain both — a shared pool with at least
    /// `size` members, or (for bin strata) both eligible in different bins
    /// with every bin nonempty.
    pub fn analytic_neighborhood(&self, a: VertexId) -> Result<Vec<VertexId>> {
        let pos = self.position_of(a)?;
        let nb = self.neighborhood_mask(pos);
        Ok(nb
            .iter()
            .enumerate()
            .filter(|(_, &in_nb)| in_nb)
            .map(|(i, _)| self.vertices()[i])
            .collect())
    }

    /// Count profile of `a`, computed per size stratum: binomials of pool
    /// intersections for subset strata, per-bin intersection products for
    /// bin strata.
    pub fn analytic_count_profile(&self, a: VertexId) -> Result<CountProfile> {
        let pos = self.position_of(a)?;
        let nb = self.neighborhood_mask(pos);
        Ok(self.profile_from_mask(a, &nb))
    }

    /// Profiles of every vertex, in vertex order. Vertices with the same
    /// stratum-membership pattern share one computation; distinct patterns
    /// are evaluated in parallel with a deterministic assembly order.
    pub fn analytic_profiles(&self) -> Vec<CountProfile> {
        let n = self.vertices().len();
        let mut key_ids: std::collections::HashMap<Vec<u32>, u32> = Default::default();
        let mut key_rep: Vec<u32> = Vec::new();
        let mut key_of: Vec<u32> = Vec::with_capacity(n);
        for pos in 0..n as u32 {
            let key = self.membership_key(pos);
            let next = key_rep.len() as u32;
            let id = *key_ids.entry(key).or_insert(next);
            if id == next {
                key_rep.push(pos);
            }
            key_of.push(id);
        }
        let by_key: Vec<CountProfile> = key_rep
            .par_iter()
            .map(|&pos| {
                let nb = self.neighborhood_mask(pos);
                self.profile_from_mask(self.vertices()[pos as usize], &nb)
            })
            .collect();
        (0..n)
            .map(|pos| {
                let mut p = by_key[key_of[pos] as usize].clone();
                p.set_owner(self.vertices()[pos]);
                p
            })
            .collect()
    }

    /// Exact number of hyperedges, per size and label: binomials of pool
    /// sizes for subset strata, products of per-bin eligible counts for
    /// bin strata.
    pub fn edge_count_summary(&self) -> EdgeCountSummary {
        let full = vec![true; self.vertices().len()];
        let mut by_size_label = BTreeMap::new();
        for layer in self.layers() {
            let (total, special) = self.layer_counts(layer, &full);
            self.bump(&mut by_size_label, layer.size(), total, special);
        }
        let total = by_size_label.values().sum();
        EdgeCountSummary {
            total,
            by_size_label,
        }
    }

    /// Materializes every hyperedge, guarded by `cap`: errors with the
    /// exact count when the hypergraph has more than `cap` edges.
    pub fn enumerate(&self, cap: u64) -> Result<ExplicitHypergraph> {
        let summary = self.edge_count_summary();
        if summary.total > BigUint::from(cap) {
            return Err(Error::EnumerationInfeasible {
                edges: summary.total,
                cap,
            });
        }
        let mut edges: Vec<(Vec<VertexId>, PropertyLabel)> = Vec::new();
        let mut values = Vec::new();
        let emit = |positions: &[u32], this: &Self, edges: &mut Vec<_>, values: &mut Vec<u64>| {
            values.clear();
            values.extend(positions.iter().map(|&p| this.value_at(p)));
            let label = this.labeler().label_of(values);
            edges.push((values.iter().map(|&v| VertexId(v)).collect(), label));
        };
        for layer in self.layers() {
            match layer {
                SizeLayer::Pools { size, pools } => {
                    for pool in pools {
                        for combo in combinations(pool, *size) {
                            emit(&combo, self, &mut edges, &mut values);
                        }
                    }
                }
                SizeLayer::Bins { eligible, .. } => {
                    if eligible.iter().all(|e| !e.is_empty()) {
                        for combo in cartesian(eligible) {
                            emit(&combo, self, &mut edges, &mut values);
                        }
                    }
                }
            }
        }
        ExplicitHypergraph::with_context(
            self.vertices().to_vec(),
            edges,
            self.property_set().to_vec(),
            self.max_edge_size(),
        )
    }

    /// Bitmask of the neighborhood of the vertex at `pos`.
    pub(crate) fn neighborhood_mask(&self, pos: u32) -> Vec<bool> {
        let n = self.vertices().len();
        let mut mask = vec![false; n];
        mask[pos as usize] = true;
        for layer in self.layers() {
            match layer {
                SizeLayer::Pools { size, pools } => {
                    for pool in pools {
                        if pool.len() >= *size && pool.binary_search(&pos).is_ok() {
                            for &p in pool {
                                mask[p as usize] = true;
                            }
                        }
                    }
                }
                SizeLayer::Bins {
                    bounds, eligible, ..
                } => {
                    if eligible.iter().any(|e| e.is_empty()) {
                        continue;
                    }
                    let bin = bin_of(bounds, pos);
                    if eligible[bin].binary_search(&pos).is_err() {
                        continue;
                    }
                    for (j, elig) in eligible.iter().enumerate() {
                        if j == bin {
                            continue;
                        }
                        for &p in elig {
                            mask[p as usize] = true;
                        }
                    }
                }
            }
        }
        mask
    }

    fn profile_from_mask(&self, owner: VertexId, mask: &[bool]) -> CountProfile {
        let mut by_size_label = BTreeMap::new();
        for layer in self.layers() {
            let (total, special) = self.layer_counts(layer, mask);
            self.bump(&mut by_size_label, layer.size(), total, special);
        }
        let mut p = CountProfile::empty(owner, self.property_set().to_vec(), self.max_edge_size());
        for ((size, label), count) in by_size_label {
            p.add(size, label, count);
        }
        p
    }

    /// (all edges, special-labeled edges) of one stratum restricted to the
    /// masked vertex set.
    fn layer_counts(&self, layer: &SizeLayer, mask: &[bool]) -> (BigUint, BigUint) {
        let special_flag = self.special_flag();
        let has_special = self.labeler().special.is_some();
        match layer {
            SizeLayer::Pools { size, pools } => {
                let mut total = BigUint::zero();
                let mut special = BigUint::zero();
                for pool in pools {
                    let mut inside = 0u64;
                    let mut inside_special = 0u64;
                    for &p in pool {
                        if mask[p as usize] {
                            inside += 1;
                            if has_special && special_flag[p as usize] {
                                inside_special += 1;
                            }
                        }
                    }
                    total += binomial(BigUint::from(inside), BigUint::from(*size));
                    if has_special {
                        special += binomial(BigUint::from(inside_special), BigUint::from(*size));
                    }
                }
                (total, special)
            }
            SizeLayer::Bins { eligible, .. } => {
                let mut total = BigUint::one();
                let mut special = if has_special {
                    BigUint::one()
                } else {
                    BigUint::zero()
                };
                for elig in eligible {
                    let mut inside = 0u64;
                    let mut inside_special = 0u64;
                    for &p in elig {
                        if mask[p as usize] {
                            inside += 1;
                            if has_special && special_flag[p as usize] {
                                inside_special += 1;
                            }
                        }
                    }
                    total *= BigUint::from(inside);
                    if has_special {
                        special *= BigUint::from(inside_special);
                    }
                }
                (total, special)
            }
        }
    }

    fn bump(
        &self,
        acc: &mut BTreeMap<(usize, PropertyLabel), BigUint>,
        size: usize,
        total: BigUint,
        special: BigUint,
    ) {
        let base = &total - &special;
        if !special.is_zero() {
            *acc.entry((size, self.labeler().special_label.clone()))
                .or_insert_with(BigUint::zero) += special;
        }
        if !base.is_zero() {
            *acc.entry((size, self.labeler().base_label.clone()))
                .or_insert_with(BigUint::zero) += base;
        }
    }

    /// Pattern of stratum memberships that determines the neighborhood:
    /// per layer, the index of the completable pool containing the vertex
    /// (subset strata) or its bin index when eligible and the stratum is
    /// alive (bin strata); `u32::MAX` when the layer contributes nothing.
    fn membership_key(&self, pos: u32) -> Vec<u32> {
        self.layers()
            .iter()
            .map(|layer| match layer {
                SizeLayer::Pools { size, pools } => pools
                    .iter()
                    .position(|pool| pool.len() >= *size && pool.binary_search(&pos).is_ok())
                    .map_or(u32::MAX, |i| i as u32),
                SizeLayer::Bins {
                    bounds, eligible, ..
                } => {
                    if eligible.iter().any(|e| e.is_empty()) {
                        return u32::MAX;
                    }
                    let bin = bin_of(bounds, pos);
                    if eligible[bin].binary_search(&pos).is_ok() {
                        bin as u32
                    } else {
                        u32::MAX
                    }
                }
            })
            .collect()
    }
}

fn bin_of(bounds: &[u32], pos: u32) -> usize {
    debug_assert!(pos < *bounds.last().unwrap());
    bounds.partition_point(|&b| b <= pos) - 1
}

/// All `k`-subsets of `items` in lexicographic order.
fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    let n = items.len();
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance the rightmost index that can still move
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Cartesian product taking one element from each group, in lexicographic
/// order of group indices.
fn cartesian(groups: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for group in groups {
        let mut next = Vec::with_capacity(out.len() * group.len());
        for prefix in &out {
            for &item in group {
                let mut row = prefix.clone();
                row.push(item);
                next.push(row);
            }
        }
        out = next;
    }
    out
}
