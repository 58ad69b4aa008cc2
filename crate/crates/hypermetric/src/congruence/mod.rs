//! Congruence hypergraphs: implicit hypergraph families whose hyperedges
//! are defined by residue conditions, so neighborhoods and count profiles
//! can be computed by combinatorial counting instead of edge enumeration.
//!
//! Three families are supported. The general family takes disjoint blocks
//! of integers with per-size moduli and residue sets; every same-residue
//! subset of admissible size is a hyperedge. The first worked family puts
//! same-parity pairs and fixed-residue n-tuples (3 <= n <= 9) on an
//! integer range, labeling an edge by whether all of its vertices are
//! divisible by a chosen modulus. The second samples a vertex set, splits
//! it into per-size quantile bins, and forms an edge from one eligible
//! vertex per bin, labeling by residues relative to an odd prime.

mod ops;

use std::collections::{HashMap, HashSet};

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{PropertyLabel, VertexId};

pub use ops::EdgeCountSummary;

/// Parameters of the first worked family on `{1..n_vertices}`.
///
/// Pairs with equal parity form 2-hyperedges; for each size `m` in 3..=9,
/// the vertices congruent to `m mod 3` (mapped to residues 0, 1, 2) form
/// the pool whose m-subsets are m-hyperedges. An edge is labeled `1` when
/// all of its vertices are divisible by `divisor_property_modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example1Spec {
    pub n_vertices: u64,
    #[serde(default = "default_divisor_modulus")]
    pub divisor_property_modulus: u64,
}

fn default_divisor_modulus() -> u64 {
    11
}

impl Example1Spec {
    pub fn new(n_vertices: u64) -> Self {
        Example1Spec {
            n_vertices,
            divisor_property_modulus: default_divisor_modulus(),
        }
    }
}

/// Parameters of the second worked family: a seeded sample of
/// `sample_size` integers from `{1..universe_max}`, per-size quantile
/// bins, eligibility `a = 1 (mod alpha_m)`, and labels decided by whether
/// every vertex falls in the non-positive half of the symmetric residue
/// system modulo `beta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example2Spec {
    #[serde(default = "default_universe_max")]
    pub universe_max: u64,
    #[serde(default = "default_sample_size")]
    pub sample_size: u64,
    #[serde(default = "default_alphas")]
    pub alphas: [u64; 8],
    #[serde(default = "default_beta")]
    pub beta: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_universe_max() -> u64 {
    8000
}

fn default_sample_size() -> u64 {
    5000
}

fn default_alphas() -> [u64; 8] {
    [3, 4, 5, 7, 11, 13, 17, 19]
}

fn default_beta() -> u64 {
    23
}

impl Default for Example2Spec {
    fn default() -> Self {
        Example2Spec {
            universe_max: default_universe_max(),
            sample_size: default_sample_size(),
            alphas: default_alphas(),
            beta: default_beta(),
            seed: 0,
        }
    }
}

/// One size rule of a general-family block: all pairwise differences of a
/// `size`-subset must vanish modulo `modulus` and the shared residue must
/// lie in `residues`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRule {
    pub size: usize,
    pub modulus: u64,
    pub residues: Vec<i64>,
}

/// A block of the general family: a vertex list plus one rule per size
/// from 2 up to the block's maximum edge size. A block with no rules
/// contributes isolated vertices only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceBlock {
    pub vertices: Vec<u64>,
    #[serde(default)]
    pub rules: Vec<BlockRule>,
}

/// General congruence family: pairwise-disjoint blocks, each carrying its
/// own size rules. With `label_modulus` set, an edge is labeled `1` when
/// every vertex is divisible by it, `0` otherwise; without it all edges
/// are labeled `0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralCongruenceSpec {
    pub blocks: Vec<CongruenceBlock>,
    #[serde(default)]
    pub label_modulus: Option<u64>,
}

/// Any of the three congruence families, tagged for JSON spec files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CongruenceSpec {
    Example1(Example1Spec),
    Example2(Example2Spec),
    General(GeneralCongruenceSpec),
}

impl CongruenceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// How edges of a family are labeled: an optional "special" predicate on
/// vertex values; an edge where every vertex satisfies it gets
/// `special_label`, every other edge gets `base_label`.
#[derive(Debug, Clone)]
pub(crate) struct EdgeLabeler {
    pub special: Option<SpecialRule>,
    pub special_label: PropertyLabel,
    pub base_label: PropertyLabel,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum SpecialRule {
    /// Vertex value divisible by the modulus.
    DivisibleBy(u64),
    /// Vertex value maps into the non-positive half of the symmetric
    /// residue system modulo the given odd prime.
    SymmetricNonPositive(u64),
}

impl SpecialRule {
    pub fn holds(&self, value: u64) -> bool {
        match *self {
            SpecialRule::DivisibleBy(d) => value % d == 0,
            SpecialRule::SymmetricNonPositive(beta) => {
                let r = value % beta;
                r == 0 || r > (beta - 1) / 2
            }
        }
    }
}

impl EdgeLabeler {
    pub fn label_of(&self, values: &[u64]) -> PropertyLabel {
        match self.special {
            Some(rule) if values.iter().all(|&v| rule.holds(v)) => self.special_label.clone(),
            _ => self.base_label.clone(),
        }
    }
}

/// One edge-size stratum of an implicit hypergraph, expressed over vertex
/// positions.
#[derive(Debug, Clone)]
pub(crate) enum SizeLayer {
    /// Every `size`-subset of a pool is an edge. Pools within one layer
    /// are pairwise disjoint.
    Pools { size: usize, pools: Vec<Vec<u32>> },
    /// An edge takes exactly one eligible vertex from every bin.
    /// `bounds[j]..bounds[j+1]` are the positions of bin `j`.
    Bins {
        size: usize,
        bounds: Vec<u32>,
        eligible: Vec<Vec<u32>>,
    },
}

impl SizeLayer {
    pub fn size(&self) -> usize {
        match self {
            SizeLayer::Pools { size, .. } | SizeLayer::Bins { size, .. } => *size,
        }
    }
}

/// A congruence hypergraph whose hyperedges are never materialized:
/// neighborhoods and count profiles come from the per-size pool or bin
/// structure. A small-scale enumerator is provided as a testing oracle.
#[derive(Debug, Clone)]
pub struct ImplicitHypergraph {
    spec: CongruenceSpec,
    vertices: Vec<VertexId>,
    position: HashMap<u64, u32>,
    layers: Vec<SizeLayer>,
    labeler: EdgeLabeler,
    /// Per-position cache of the labeler's special predicate.
    special_flag: Vec<bool>,
    property_set: Vec<PropertyLabel>,
    max_edge_size: usize,
}

impl ImplicitHypergraph {
    /// Validates the spec, materializes the vertex list, and derives the
    /// per-size pools or bins.
    pub fn build(spec: CongruenceSpec) -> Result<Self> {
        let values = match &spec {
            CongruenceSpec::Example1(s) => {
                validate_example1(s)?;
                (1..=s.n_vertices).collect::<Vec<u64>>()
            }
            CongruenceSpec::Example2(s) => {
                validate_example2(s)?;
                sample_vertices(s)
            }
            CongruenceSpec::General(s) => {
                validate_general(s)?;
                s.blocks.iter().flat_map(|b| b.vertices.iter().copied()).collect()
            }
        };
        Self::assemble(spec, values)
    }

    /// Rebuilds the same family on the first `n` vertices of this
    /// hypergraph. Quantile bins and pools are recomputed on the prefix.
    pub fn restrict_to_prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.vertices.len() {
            return Err(Error::InvalidSpec(format!(
                "prefix length {n} out of range 1..={}",
                self.vertices.len()
            )));
        }
        let values: Vec<u64> = self.vertices[..n].iter().map(|v| v.0).collect();
        Self::assemble(self.spec.clone(), values)
    }

    fn assemble(spec: CongruenceSpec, values: Vec<u64>) -> Result<Self> {
        let mut position = HashMap::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            if position.insert(v, i as u32).is_some() {
                return Err(Error::DuplicateVertex(VertexId(v)));
            }
        }
        let (layers, labeler, max_edge_size) = match &spec {
            CongruenceSpec::Example1(s) => {
                let layers = example1_layers(&values);
                let labeler = EdgeLabeler {
                    special: Some(SpecialRule::DivisibleBy(s.divisor_property_modulus)),
                    special_label: PropertyLabel::new("1"),
                    base_label: PropertyLabel::new("0"),
                };
                (layers, labeler, 9)
            }
            CongruenceSpec::Example2(s) => {
                let layers = example2_layers(&values, &s.alphas);
                let labeler = EdgeLabeler {
                    special: Some(SpecialRule::SymmetricNonPositive(s.beta)),
                    special_label: PropertyLabel::new("-1"),
                    base_label: PropertyLabel::new("1"),
                };
                (layers, labeler, 9)
            }
            CongruenceSpec::General(s) => {
                let layers = general_layers(s, &values, &position);
                let max = s
                    .blocks
                    .iter()
                    .flat_map(|b| b.rules.iter().map(|r| r.size))
                    .max()
                    .unwrap_or(2);
                let labeler = match s.label_modulus {
                    Some(m) => EdgeLabeler {
                        special: Some(SpecialRule::DivisibleBy(m)),
                        special_label: PropertyLabel::new("1"),
                        base_label: PropertyLabel::new("0"),
                    },
                    None => EdgeLabeler {
                        special: None,
                        special_label: PropertyLabel::new("1"),
                        base_label: PropertyLabel::new("0"),
                    },
                };
                (layers, labeler, max)
            }
        };
        let property_set = match labeler.special {
            Some(_) => {
                let mut set = vec![labeler.base_label.clone(), labeler.special_label.clone()];
                set.sort();
                set
            }
            None => vec![labeler.base_label.clone()],
        };
        let special_flag = values
            .iter()
            .map(|&v| labeler.special.map_or(false, |r| r.holds(v)))
            .collect();
        Ok(ImplicitHypergraph {
            spec,
            vertices: values.into_iter().map(VertexId).collect(),
            position,
            layers,
            labeler,
            special_flag,
            property_set,
            max_edge_size,
        })
    }

    pub fn spec(&self) -> &CongruenceSpec {
        &self.spec
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn property_set(&self) -> &[PropertyLabel] {
        &self.property_set
    }

    pub fn max_edge_size(&self) -> usize {
        self.max_edge_size
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.position.contains_key(&v.0)
    }

    pub(crate) fn position_of(&self, v: VertexId) -> Result<u32> {
        self.position.get(&v.0).copied().ok_or(Error::VertexNotFound(v))
    }

    pub(crate) fn layers(&self) -> &[SizeLayer] {
        &self.layers
    }

    pub(crate) fn labeler(&self) -> &EdgeLabeler {
        &self.labeler
    }

    pub(crate) fn special_flag(&self) -> &[bool] {
        &self.special_flag
    }

    pub(crate) fn value_at(&self, pos: u32) -> u64 {
        self.vertices[pos as usize].0
    }
}

fn validate_example1(s: &Example1Spec) -> Result<()> {
    if s.n_vertices < 9 {
        return Err(Error::InvalidSpec(format!(
            "n_vertices must be at least 9, got {}",
            s.n_vertices
        )));
    }
    if s.divisor_property_modulus == 0 {
        return Err(Error::InvalidSpec(
            "divisor_property_modulus must be positive".into(),
        ));
    }
    Ok(())
}

fn validate_example2(s: &Example2Spec) -> Result<()> {
    for (i, &a) in s.alphas.iter().enumerate() {
        if a < 2 {
            return Err(Error::InvalidSpec(format!("modulus alpha[{i}] = {a} must be >= 2")));
        }
        for &b in &s.alphas[i + 1..] {
            if a.gcd(&b) != 1 {
                return Err(Error::InvalidSpec(format!(
                    "moduli not pairwise coprime: gcd({a}, {b}) > 1"
                )));
            }
        }
    }
    if !is_odd_prime(s.beta) {
        return Err(Error::InvalidSpec(format!("beta = {} is not an odd prime", s.beta)));
    }
    if s.alphas.iter().any(|&a| a % s.beta == 0) {
        return Err(Error::InvalidSpec(format!("beta = {} divides one of the alphas", s.beta)));
    }
    if s.sample_size == 0 {
        return Err(Error::InvalidSpec("sample_size must be positive".into()));
    }
    if s.sample_size > s.universe_max {
        return Err(Error::InvalidSpec(format!(
            "sample_size {} exceeds universe_max {}",
            s.sample_size, s.universe_max
        )));
    }
    Ok(())
}

fn validate_general(s: &GeneralCongruenceSpec) -> Result<()> {
    let mut seen: HashSet<u64> = HashSet::new();
    for (bi, block) in s.blocks.iter().enumerate() {
        for &v in &block.vertices {
            if !seen.insert(v) {
                return Err(Error::InvalidSpec(format!(
                    "blocks are not pairwise disjoint: vertex {v} repeats (block {bi})"
                )));
            }
        }
        if block.rules.is_empty() {
            continue;
        }
        let mut sizes: Vec<usize> = block.rules.iter().map(|r| r.size).collect();
        sizes.sort_unstable();
        let s_max = *sizes.last().expect("nonempty rules");
        let expected: Vec<usize> = (2..=s_max).collect();
        if sizes != expected {
            return Err(Error::InvalidSpec(format!(
                "block {bi} must declare one rule per size 2..={s_max}, got sizes {sizes:?}"
            )));
        }
        if s_max > block.vertices.len() {
            return Err(Error::InvalidSpec(format!(
                "block {bi} max edge size {s_max} exceeds its {} vertices",
                block.vertices.len()
            )));
        }
        for rule in &block.rules {
            if rule.modulus < 2 {
                return Err(Error::InvalidSpec(format!(
                    "block {bi} size-{} modulus must be >= 2",
                    rule.size
                )));
            }
        }
    }
    if let Some(m) = s.label_modulus {
        if m == 0 {
            return Err(Error::InvalidSpec("label_modulus must be positive".into()));
        }
    }
    Ok(())
}

fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Seeded uniform sample without replacement from `{1..universe_max}`,
/// sorted ascending: a partial Fisher-Yates shuffle over the universe.
fn sample_vertices(s: &Example2Spec) -> Vec<u64> {
    let mut rng = ChaCha12Rng::seed_from_u64(s.seed);
    let mut pool: Vec<u64> = (1..=s.universe_max).collect();
    let (sampled, _) = pool.partial_shuffle(&mut rng, s.sample_size as usize);
    let mut out = sampled.to_vec();
    out.sort_unstable();
    out
}

fn example1_layers(values: &[u64]) -> Vec<SizeLayer> {
    let mut layers = Vec::with_capacity(8);
    let parity_pools: Vec<Vec<u32>> = [1u64, 0u64]
        .iter()
        .map(|&r| {
            values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v % 2 == r)
                .map(|(i, _)| i as u32)
                .collect()
        })
        .collect();
    layers.push(SizeLayer::Pools {
        size: 2,
        pools: parity_pools,
    });
    for m in 3..=9u64 {
        let residue = m % 3;
        let pool: Vec<u32> = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v % m == residue)
            .map(|(i, _)| i as u32)
            .collect();
        layers.push(SizeLayer::Pools {
            size: m as usize,
            pools: vec![pool],
        });
    }
    layers
}

/// Nearest-rank quantile bins: bin `j` (0-based) holds sorted positions
/// `ceil(j*n/size) .. ceil((j+1)*n/size)`.
fn example2_layers(values: &[u64], alphas: &[u64; 8]) -> Vec<SizeLayer> {
    let n = values.len() as u64;
    let mut layers = Vec::with_capacity(8);
    for (idx, &alpha) in alphas.iter().enumerate() {
        let size = idx + 2;
        let k = size as u64;
        let bounds: Vec<u32> = (0..=k).map(|j| ((j * n).div_ceil(k)) as u32).collect();
        let eligible: Vec<Vec<u32>> = (0..size)
            .map(|j| {
                (bounds[j]..bounds[j + 1])
                    .filter(|&p| values[p as usize] % alpha == 1)
                    .collect()
            })
            .collect();
        layers.push(SizeLayer::Bins {
            size,
            bounds,
            eligible,
        });
    }
    layers
}

fn general_layers(
    spec: &GeneralCongruenceSpec,
    values: &[u64],
    position: &HashMap<u64, u32>,
) -> Vec<SizeLayer> {
    // One layer per size, gathering the residue pools of every block that
    // declares that size. Pools stay disjoint because blocks are.
    let mut by_size: std::collections::BTreeMap<usize, Vec<Vec<u32>>> = Default::default();
    for block in &spec.blocks {
        let members: Vec<(u64, u32)> = block
            .vertices
            .iter()
            .filter_map(|&v| position.get(&v).map(|&p| (v, p)))
            .collect();
        for rule in &block.rules {
            let residues: HashSet<u64> = rule
                .residues
                .iter()
                .map(|&r| r.rem_euclid(rule.modulus as i64) as u64)
                .collect();
            let mut residues: Vec<u64> = residues.into_iter().collect();
            residues.sort_unstable();
            let pools = by_size.entry(rule.size).or_default();
            for r in residues {
                let mut pool: Vec<u32> = members
                    .iter()
                    .filter(|(v, _)| v % rule.modulus == r)
                    .map(|&(_, p)| p)
                    .collect();
                pool.sort_unstable();
                pools.push(pool);
            }
        }
    }
    let _ = values;
    by_size
        .into_iter()
        .map(|(size, pools)| SizeLayer::Pools { size, pools })
        .collect()
}
