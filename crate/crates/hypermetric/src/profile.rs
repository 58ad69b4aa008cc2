//! Per-vertex hyperedge count profiles and the L1 distance between them.
//!
//! A profile records, for each (edge size, property label) pair, how many
//! hyperedges with that size and label lie inside the vertex's
//! neighborhood. Counts are exact big integers; two profiles are
//! equivalent when all counts agree, and the distance between profiles is
//! the sum of absolute count differences. That distance is a metric
//! modulo the equivalence: zero exactly on equivalent profiles, symmetric,
//! and triangle-inequality-satisfying.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hypergraph::{PropertyLabel, VertexId};

/// Exact counts of labeled hyperedges contained in one vertex's
/// neighborhood, keyed by (edge size, label). Missing keys are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountProfile {
    owner: VertexId,
    counts: BTreeMap<(usize, PropertyLabel), BigUint>,
    property_set: Vec<PropertyLabel>,
    max_edge_size: usize,
}

impl CountProfile {
    pub fn empty(owner: VertexId, property_set: Vec<PropertyLabel>, max_edge_size: usize) -> Self {
        CountProfile {
            owner,
            counts: BTreeMap::new(),
            property_set,
            max_edge_size,
        }
    }

    pub fn owner(&self) -> VertexId {
        self.owner
    }

    pub(crate) fn set_owner(&mut self, owner: VertexId) {
        self.owner = owner;
    }

    pub fn property_set(&self) -> &[PropertyLabel] {
        &self.property_set
    }

    pub fn max_edge_size(&self) -> usize {
        self.max_edge_size
    }

    /// Adds to the count at (size, label). Zero increments are dropped so
    /// the map stays sparse.
    pub fn add(&mut self, size: usize, label: PropertyLabel, amount: impl Into<BigUint>) {
        let amount = amount.into();
        if amount.is_zero() {
            return;
        }
        *self.counts.entry((size, label)).or_insert_with(BigUint::zero) += amount;
    }

    pub fn get(&self, size: usize, label: &PropertyLabel) -> BigUint {
        self.counts
            .get(&(size, label.clone()))
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    /// Nonzero entries in (size, label) order.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, PropertyLabel), &BigUint)> {
        self.counts.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty()
    }

    /// Sum of all counts: the total number of hyperedges in the
    /// neighborhood.
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// The equivalence relation: counts agree for every (size, label).
    /// Callers must compare profiles computed over the same property set
    /// and maximum edge size.
    pub fn equivalent(&self, other: &CountProfile) -> bool {
        self.counts == other.counts
    }

    /// L1 distance between count profiles. Errors when the profiles were
    /// computed over different property sets or maximum edge sizes.
    pub fn distance(&self, other: &CountProfile) -> Result<BigUint> {
        self.check_context(other)?;
        Ok(self.distance_unchecked(other))
    }

    pub(crate) fn check_context(&self, other: &CountProfile) -> Result<()> {
        if !same_property_set(&self.property_set, &other.property_set) {
            return Err(Error::PropertySetMismatch);
        }
        if self.max_edge_size != other.max_edge_size {
            return Err(Error::MaxSizeMismatch(self.max_edge_size, other.max_edge_size));
        }
        Ok(())
    }

    pub(crate) fn distance_unchecked(&self, other: &CountProfile) -> BigUint {
        let mut sum = BigUint::zero();
        let mut left = self.counts.iter().peekable();
        let mut right = other.counts.iter().peekable();
        loop {
            match (left.peek(), right.peek()) {
                (Some((lk, lv)), Some((rk, rv))) => {
                    if lk < rk {
                        sum += (*lv).clone();
                        left.next();
                    } else if rk < lk {
                        sum += (*rv).clone();
                        right.next();
                    } else {
                        sum += abs_diff(lv, rv);
                        left.next();
                        right.next();
                    }
                }
                (Some((_, lv)), None) => {
                    sum += (*lv).clone();
                    left.next();
                }
                (None, Some((_, rv))) => {
                    sum += (*rv).clone();
                    right.next();
                }
                (None, None) => break,
            }
        }
        sum
    }

    /// Key view used for grouping equal profiles.
    pub(crate) fn counts_key(&self) -> &BTreeMap<(usize, PropertyLabel), BigUint> {
        &self.counts
    }
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

fn same_property_set(a: &[PropertyLabel], b: &[PropertyLabel]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a: Vec<_> = a.to_vec();
    let mut b: Vec<_> = b.to_vec();
    a.sort();
    b.sort();
    a == b
}
