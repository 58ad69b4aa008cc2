//! Vietoris-Rips persistent homology over the quotient of a distance
//! matrix by its zero-distance classes, barcodes for nested vertex-prefix
//! filtrations, and barcode export.
//!
//! Persistence is computed on the quotient space: collapsing
//! zero-distance points only removes zero-persistence intervals, and the
//! quotient typically has orders of magnitude fewer points than the raw
//! vertex set.

mod reduction;

use std::io::Write;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::community;
use crate::error::{Error, Result};
use crate::hypergraph::VertexId;
use crate::matrix::DistanceMatrix;
use crate::pipeline::HypergraphSource;

pub use reduction::mst_edge_weights;

/// A finite metric space with strictly positive off-diagonal distances,
/// obtained by collapsing the zero-distance classes of a matrix. Class
/// representatives are the least vertex ids; multiplicities record how
/// many original points each class absorbed.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    classes: Vec<VertexId>,
    multiplicity: Vec<usize>,
    dist: Vec<BigUint>,
}

impl QuotientSpace {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[VertexId] {
        &self.classes
    }

    pub fn multiplicity(&self, i: usize) -> usize {
        self.multiplicity[i]
    }

    pub fn total_points(&self) -> usize {
        self.multiplicity.iter().sum()
    }

    pub fn distance(&self, i: usize, j: usize) -> &BigUint {
        &self.dist[i * self.classes.len() + j]
    }
}

/// One persistence interval; `death` is `None` for essential classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistenceInterval {
    pub dim: u8,
    pub birth: BigUint,
    pub death: Option<BigUint>,
}

impl PersistenceInterval {
    pub fn persistence(&self) -> Option<BigUint> {
        self.death.as_ref().map(|d| d - &self.birth)
    }
}

/// Persistence intervals sorted by (dimension, birth, death), finite
/// deaths before infinite ones. Zero-persistence intervals are never
/// included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barcode {
    pub intervals: Vec<PersistenceInterval>,
}

impl Barcode {
    pub fn dim_intervals(&self, dim: u8) -> impl Iterator<Item = &PersistenceInterval> {
        self.intervals.iter().filter(move |i| i.dim == dim)
    }

    /// Largest finite death across all intervals, if any.
    pub fn max_finite_death(&self) -> Option<BigUint> {
        self.intervals
            .iter()
            .filter_map(|i| i.death.clone())
            .max()
    }

    /// Default cutoff separating important bars from noise: five percent
    /// of the largest finite death (integer floor).
    pub fn default_importance_threshold(&self) -> BigUint {
        self.max_finite_death()
            .map(|d| d * 5u32 / 100u32)
            .unwrap_or_default()
    }

    /// CSV export: `dimension,birth,death` with `inf` for infinite
    /// deaths.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "dimension,birth,death")?;
        for i in &self.intervals {
            match &i.death {
                Some(d) => writeln!(w, "{},{},{}", i.dim, i.birth, d)?,
                None => writeln!(w, "{},{},inf", i.dim, i.birth)?,
            }
        }
        Ok(())
    }

    /// Minimal SVG rendering: horizontal bars grouped by dimension.
    pub fn write_svg<W: Write>(&self, mut w: W) -> Result<()> {
        let width = 800.0;
        let bar_h = 6.0;
        let gap = 3.0;
        let margin = 10.0;
        let max = self
            .max_finite_death()
            .map(|d| biguint_to_f64(&d))
            .unwrap_or(1.0)
            .max(1.0);
        let scale = (width - 2.0 * margin) / (max * 1.05);
        let rows = self.intervals.len().max(1);
        let height = margin * 2.0 + rows as f64 * (bar_h + gap);
        writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        )?;
        let mut y = margin;
        for dim in 0u8..=1 {
            let color = if dim == 0 { "#4878cf" } else { "#d65f5f" };
            for iv in self.dim_intervals(dim) {
                let x0 = margin + biguint_to_f64(&iv.birth) * scale;
                let x1 = match &iv.death {
                    Some(d) => margin + biguint_to_f64(d) * scale,
                    None => width - margin,
                };
                let len = (x1 - x0).max(0.5);
                writeln!(
                    w,
                    r#"<rect x="{x0:.2}" y="{y:.2}" width="{len:.2}" height="{bar_h}" fill="{color}"/>"#
                )?;
                y += bar_h + gap;
            }
        }
        writeln!(w, "</svg>")?;
        Ok(())
    }
}

fn biguint_to_f64(v: &BigUint) -> f64 {
    v.to_string().parse::<f64>().unwrap_or(f64::MAX)
}

/// Collapses the zero-distance classes of a matrix into a strictly
/// positive finite metric space.
pub fn quotient(matrix: &DistanceMatrix) -> QuotientSpace {
    let part = community::partition(matrix);
    let classes: Vec<VertexId> = part.representatives().to_vec();
    let sizes = part.class_sizes();
    let multiplicity: Vec<usize> = classes.iter().map(|rep| sizes[rep]).collect();
    let c = classes.len();
    let mut dist = vec![BigUint::zero(); c * c];
    for i in 0..c {
        let pi = matrix.position_of(classes[i]).expect("representative present");
        for j in (i + 1)..c {
            let pj = matrix.position_of(classes[j]).expect("representative present");
            let d = matrix.entry(pi, pj).clone();
            dist[i * c + j] = d.clone();
            dist[j * c + i] = d;
        }
    }
    QuotientSpace {
        classes,
        multiplicity,
        dist,
    }
}

/// Persistence intervals of the Vietoris-Rips filtration of the quotient
/// space, in dimensions 0..=max_dim (max_dim is 0 or 1). Dimension-0
/// intervals are one `(0, w)` per minimum-spanning-tree edge weight plus
/// a single `(0, inf)`; dimension-1 intervals come from boundary
/// reduction over the two-element field.
pub fn vr_persistence(space: &QuotientSpace, max_dim: usize) -> Result<Barcode> {
    let n = space.class_count();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let raw = reduction::vr_intervals(n, &|i, j| space.distance(i, j).clone(), max_dim.min(1));
    let intervals = raw
        .into_iter()
        .map(|r| PersistenceInterval {
            dim: r.dim,
            birth: r.birth,
            death: r.death,
        })
        .collect();
    Ok(Barcode { intervals })
}

/// Barcode of a raw distance matrix: quotient first, then reduction.
pub fn matrix_barcode(matrix: &DistanceMatrix, max_dim: usize) -> Result<Barcode> {
    vr_persistence(&quotient(matrix), max_dim)
}

/// Persistence of an arbitrary finite (pseudo-)metric space given as a
/// distance lookup, without quotienting. Zero-persistence intervals are
/// discarded, so the result agrees with the quotient route on any input.
pub fn vr_persistence_raw(
    n: usize,
    dist: &dyn Fn(usize, usize) -> BigUint,
    max_dim: usize,
) -> Result<Barcode> {
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let raw = reduction::vr_intervals(n, dist, max_dim.min(1));
    Ok(Barcode {
        intervals: raw
            .into_iter()
            .map(|r| PersistenceInterval {
                dim: r.dim,
                birth: r.birth,
                death: r.death,
            })
            .collect(),
    })
}

/// Nested vertex-count prefixes of a filtration experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationSpec {
    cutoffs: Vec<usize>,
}

impl FiltrationSpec {
    /// Cutoffs must be strictly increasing; the last may not exceed
    /// `total` vertices.
    pub fn new(cutoffs: Vec<usize>, total: usize) -> Result<Self> {
        let increasing = cutoffs.windows(2).all(|w| w[0] < w[1]);
        if cutoffs.is_empty()
            || !increasing
            || cutoffs[0] == 0
            || *cutoffs.last().expect("nonempty") > total
        {
            return Err(Error::InvalidFiltration(cutoffs, total));
        }
        Ok(FiltrationSpec { cutoffs })
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }
}

/// For each cutoff `n_k`: profiles of the first `n_k` vertices, distance
/// matrix, quotient, barcode. Stages run in parallel; the result order
/// follows the cutoffs.
pub fn filtration_barcodes(
    source: &HypergraphSource,
    spec: &FiltrationSpec,
    max_dim: usize,
) -> Result<Vec<(usize, Barcode)>> {
    spec.cutoffs()
        .par_iter()
        .map(|&n| {
            let prefix = source.prefix(n)?;
            let profiles = prefix.profiles()?;
            let matrix = DistanceMatrix::from_profiles(&profiles)?;
            let barcode = matrix_barcode(&matrix, max_dim)?;
            Ok((n, barcode))
        })
        .collect()
}

/// Number of intervals of the given dimension whose persistence strictly
/// exceeds `min_persistence`; infinite intervals always count.
pub fn bar_count(barcode: &Barcode, dim: u8, min_persistence: &BigUint) -> usize {
    barcode
        .dim_intervals(dim)
        .filter(|iv| match iv.persistence() {
            None => true,
            Some(p) => p > *min_persistence,
        })
        .count()
}
