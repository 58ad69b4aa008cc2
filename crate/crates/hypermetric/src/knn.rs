//! Modified nearest-neighbor sign prediction over the profile metric, and
//! the repeated-random-split experiment harness.
//!
//! Two predictors share the notion of "the k nearest training vertices"
//! but differ on ties: the first keeps exactly k vertices, breaking
//! distance ties by a seeded random permutation; the second keeps every
//! training vertex within the distance of the k-th nearest one (stable
//! vertex-id tiebreak). Both predict the sign of the sum of neighbor
//! labels, with ties mapping to +1.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::VertexId;
use crate::matrix::DistanceMatrix;
use crate::profile::CountProfile;

/// Objective labeling: +1 for residues 0 and 1 modulo 3, -1 for residue 2.
pub fn objective_sign(v: VertexId) -> i8 {
    if v.0 % 3 == 2 {
        -1
    } else {
        1
    }
}

/// Sign with the nonnegative branch mapping to +1.
pub fn sign_of(x: i64) -> i8 {
    if x >= 0 {
        1
    } else {
        -1
    }
}

/// Exactly `k` training vertices nearest to `a`: training vertices are
/// sorted by distance with a random permutation as the tiebreak, and the
/// first `k` are returned.
pub fn knn1_neighbors(
    matrix: &DistanceMatrix,
    train: &[VertexId],
    a: VertexId,
    k: usize,
    rng: &mut impl Rng,
) -> Result<Vec<VertexId>> {
    if train.len() < k || k == 0 {
        return Err(Error::TrainTooSmall {
            train: train.len(),
            k,
        });
    }
    let pa = matrix.position_of(a).ok_or(Error::VertexNotFound(a))?;
    let mut perm: Vec<u32> = (0..train.len() as u32).collect();
    perm.shuffle(rng);
    let mut order: Vec<(usize, u32, VertexId)> = Vec::with_capacity(train.len());
    for (i, &b) in train.iter().enumerate() {
        let pb = matrix.position_of(b).ok_or(Error::VertexNotFound(b))?;
        order.push((pb, perm[i], b));
    }
    order.sort_by(|x, y| {
        matrix
            .entry(pa, x.0)
            .cmp(matrix.entry(pa, y.0))
            .then(x.1.cmp(&y.1))
    });
    Ok(order.into_iter().take(k).map(|(_, _, b)| b).collect())
}

/// Every training vertex within the distance of the k-th nearest one,
/// after sorting by distance with an ascending vertex-id tiebreak.
pub fn knnall_neighbors(
    matrix: &DistanceMatrix,
    train: &[VertexId],
    a: VertexId,
    k: usize,
) -> Result<Vec<VertexId>> {
    if train.len() < k || k == 0 {
        return Err(Error::TrainTooSmall {
            train: train.len(),
            k,
        });
    }
    let pa = matrix.position_of(a).ok_or(Error::VertexNotFound(a))?;
    let mut order: Vec<(usize, VertexId)> = Vec::with_capacity(train.len());
    for &b in train {
        let pb = matrix.position_of(b).ok_or(Error::VertexNotFound(b))?;
        order.push((pb, b));
    }
    order.sort_by(|x, y| {
        matrix
            .entry(pa, x.0)
            .cmp(matrix.entry(pa, y.0))
            .then(x.1.cmp(&y.1))
    });
    let cutoff = matrix.entry(pa, order[k - 1].0).clone();
    Ok(order
        .into_iter()
        .take_while(|(pb, _)| *matrix.entry(pa, *pb) <= cutoff)
        .map(|(_, b)| b)
        .collect())
}

/// Sign of the sum of the neighbors' training labels.
pub fn predict(labels: &HashMap<VertexId, i8>, neighbors: &[VertexId]) -> Result<i8> {
    if neighbors.is_empty() {
        return Err(Error::EmptyNeighborList);
    }
    let mut sum = 0i64;
    for v in neighbors {
        sum += *labels.get(v).ok_or(Error::VertexNotFound(*v))? as i64;
    }
    Ok(sign_of(sum))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Knn1,
    KnnAll,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Knn1 => "knn1",
            Method::KnnAll => "knnall",
        }
    }
}

/// A 70/30-style train/test split of the vertex set, with the seed that
/// produced it.
#[derive(Debug, Clone)]
pub struct LabeledSplit {
    pub train: Vec<(VertexId, i8)>,
    pub test: Vec<VertexId>,
    pub seed: u64,
}

/// Draws a split: `round(fraction * n)` (half up) vertices go to
/// training via a seeded shuffle, the rest to test, both sorted.
pub fn labeled_split(vertices: &[VertexId], fraction: f64, seed: u64) -> Result<LabeledSplit> {
    let n = vertices.len();
    let m = (fraction * n as f64 + 0.5).floor() as usize;
    if m == 0 || m >= n {
        return Err(Error::DegenerateSplit(format!(
            "fraction {fraction} on {n} vertices leaves train={m}, test={}",
            n - m
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let mut train_idx = idx[..m].to_vec();
    let mut test_idx = idx[m..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok(LabeledSplit {
        train: train_idx
            .into_iter()
            .map(|i| (vertices[i], objective_sign(vertices[i])))
            .collect(),
        test: test_idx.into_iter().map(|i| vertices[i]).collect(),
        seed,
    })
}

/// The i-th element of the splitmix64 stream seeded at `master_seed`;
/// used as the per-trial seed so trials are reproducible independently of
/// execution order.
pub fn trial_seed(master_seed: u64, trial: usize) -> u64 {
    let mut state = master_seed;
    let mut out = 0;
    for _ in 0..=trial {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        out = splitmix64_mix(state);
    }
    out
}

/// Tiebreak generator for one (trial, test vertex) pair.
pub fn tiebreak_rng(trial_seed: u64, vertex: VertexId) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(splitmix64_mix(trial_seed ^ splitmix64_mix(vertex.0)))
}

fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub method: Method,
    pub k_values: Vec<usize>,
    pub trials: usize,
    pub split_fraction: f64,
    pub master_seed: u64,
}

/// Per-trial error rates for each k, their per-k averages, and the
/// predictions of the first trial for each k.
#[derive(Debug, Clone)]
pub struct KnnReport {
    pub method: Method,
    pub k_values: Vec<usize>,
    /// `rows[t][i]` is the error rate of trial `t` at `k_values[i]`.
    pub rows: Vec<Vec<f64>>,
    pub averages: Vec<f64>,
    pub trial_seeds: Vec<u64>,
    /// `(vertex, true sign, predicted sign)` per test vertex of trial 0,
    /// one list per k.
    pub first_trial_predictions: Vec<Vec<(VertexId, i8, i8)>>,
}

impl KnnReport {
    /// Average error rate per k, smallest first; ties keep the smaller k.
    pub fn best_k(&self) -> usize {
        let mut best = 0;
        for i in 1..self.k_values.len() {
            if self.averages[i] < self.averages[best] {
                best = i;
            }
        }
        self.k_values[best]
    }

    /// Tables-shaped CSV: one row per trial, one column per k, then an
    /// average row.
    pub fn write_table_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = self.k_values.iter().map(|k| format!("k={k}")).collect();
        writeln!(w, "trial,{}", header.join(","))?;
        for (t, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(w, "{},{}", t + 1, cells.join(","))?;
        }
        let cells: Vec<String> = self.averages.iter().map(|e| e.to_string()).collect();
        writeln!(w, "average,{}", cells.join(","))?;
        Ok(())
    }

    /// Predictions CSV for the given k (first trial).
    pub fn write_predictions_csv<W: Write>(&self, k: usize, mut w: W) -> Result<()> {
        let i = self
            .k_values
            .iter()
            .position(|&kk| kk == k)
            .ok_or_else(|| Error::InvalidExperiment(format!("k={k} was not evaluated")))?;
        writeln!(w, "vertex,true_sign,predicted_sign")?;
        for (v, truth, pred) in &self.first_trial_predictions[i] {
            writeln!(w, "{v},{truth},{pred}")?;
        }
        Ok(())
    }
}

/// Runs the repeated-split experiment: for each trial a fresh split from
/// a per-trial seed, error rates for every k, and per-k averages over
/// trials. Trials run in parallel; the report is identical for any worker
/// count.
pub fn run_experiment(profiles: &[CountProfile], config: &ExperimentConfig) -> Result<KnnReport> {
    if config.k_values.is_empty() {
        return Err(Error::InvalidExperiment("no k values".into()));
    }
    if config.trials == 0 {
        return Err(Error::InvalidExperiment("trials must be >= 1".into()));
    }
    if !(config.split_fraction > 0.0 && config.split_fraction < 1.0) {
        return Err(Error::InvalidExperiment(format!(
            "split fraction {} outside (0, 1)",
            config.split_fraction
        )));
    }
    let matrix = DistanceMatrix::from_profiles(profiles)?;
    let engine = Engine::new(&matrix);
    let vertices: Vec<VertexId> = matrix.vertex_ids().to_vec();
    let trial_seeds: Vec<u64> = (0..config.trials)
        .map(|t| trial_seed(config.master_seed, t))
        .collect();
    let outcomes: Vec<Result<TrialOutcome>> = trial_seeds
        .par_iter()
        .enumerate()
        .map(|(t, &seed)| engine.run_trial(&vertices, config, seed, t == 0))
        .collect();
    let mut rows = Vec::with_capacity(config.trials);
    let mut first_trial_predictions = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        rows.push(outcome.error_rates);
        if let Some(preds) = outcome.predictions {
            first_trial_predictions = preds;
        }
    }
    let averages: Vec<f64> = (0..config.k_values.len())
        .map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / config.trials as f64)
        .collect();
    Ok(KnnReport {
        method: config.method,
        k_values: config.k_values.clone(),
        rows,
        averages,
        trial_seeds,
        first_trial_predictions,
    })
}

struct TrialOutcome {
    error_rates: Vec<f64>,
    predictions: Option<Vec<Vec<(VertexId, i8, i8)>>>,
}

/// Rank-compressed view of the distance matrix: training vertices are
/// sorted by the rank of their class distance rather than by big-integer
/// comparisons. Ranks preserve the distance order exactly.
struct Engine {
    class_of: Vec<u32>,
    /// `rank[ci][cj]`: position of d(ci, cj) among the sorted distinct
    /// distances from class ci.
    rank: Vec<Vec<u32>>,
}

impl Engine {
    fn new(matrix: &DistanceMatrix) -> Engine {
        let c = matrix.class_count();
        let class_of: Vec<u32> = (0..matrix.order())
            .map(|i| matrix.class_of_position(i))
            .collect();
        let rank: Vec<Vec<u32>> = (0..c as u32)
            .map(|ci| {
                let mut values: Vec<_> = (0..c as u32)
                    .map(|cj| matrix.class_distance(ci, cj))
                    .collect();
                values.sort();
                values.dedup();
                (0..c as u32)
                    .map(|cj| {
                        values
                            .binary_search(&matrix.class_distance(ci, cj))
                            .expect("class distance present") as u32
                    })
                    .collect()
            })
            .collect();
        Engine { class_of, rank }
    }

    fn run_trial(
        &self,
        vertices: &[VertexId],
        config: &ExperimentConfig,
        seed: u64,
        keep_predictions: bool,
    ) -> Result<TrialOutcome> {
        let split = labeled_split(vertices, config.split_fraction, seed)?;
        let max_k = *config.k_values.iter().max().expect("nonempty ks");
        if split.train.len() < max_k {
            return Err(Error::TrainTooSmall {
                train: split.train.len(),
                k: max_k,
            });
        }
        let position: HashMap<VertexId, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let train_pos: Vec<(u32, VertexId, i8)> = split
            .train
            .iter()
            .map(|&(v, s)| (position[&v], v, s))
            .collect();
        let mut errors = vec![0usize; config.k_values.len()];
        let mut predictions: Vec<Vec<(VertexId, i8, i8)>> = if keep_predictions {
            vec![Vec::with_capacity(split.test.len()); config.k_values.len()]
        } else {
            Vec::new()
        };
        let mut order: Vec<(u64, i8)> = Vec::with_capacity(train_pos.len());
        for &a in &split.test {
            let ca = self.class_of[position[&a] as usize];
            let ranks = &self.rank[ca as usize];
            order.clear();
            match config.method {
                Method::Knn1 => {
                    let mut rng = tiebreak_rng(seed, a);
                    let mut perm: Vec<u32> = (0..train_pos.len() as u32).collect();
                    perm.shuffle(&mut rng);
                    for (i, &(pb, _, s)) in train_pos.iter().enumerate() {
                        let r = ranks[self.class_of[pb as usize] as usize];
                        order.push((((r as u64) << 32) | perm[i] as u64, s));
                    }
                }
                Method::KnnAll => {
                    // train is ordered by position = ascending vertex id
                    for (i, &(pb, _, s)) in train_pos.iter().enumerate() {
                        let r = ranks[self.class_of[pb as usize] as usize];
                        order.push((((r as u64) << 32) | i as u64, s));
                    }
                }
            }
            order.sort_unstable_by_key(|&(key, _)| key);
            let truth = objective_sign(a);
            for (ki, &k) in config.k_values.iter().enumerate() {
                let sum: i64 = match config.method {
                    Method::Knn1 => order[..k].iter().map(|&(_, s)| s as i64).sum(),
                    Method::KnnAll => {
                        let cutoff_rank = order[k - 1].0 >> 32;
                        order
                            .iter()
                            .take_while(|&&(key, _)| key >> 32 <= cutoff_rank)
                            .map(|&(_, s)| s as i64)
                            .sum()
                    }
                };
                let pred = sign_of(sum);
                if pred != truth {
                    errors[ki] += 1;
                }
                if keep_predictions {
                    predictions[ki].push((a, truth, pred));
                }
            }
        }
        let test_len = split.test.len() as f64;
        Ok(TrialOutcome {
            error_rates: errors.iter().map(|&e| e as f64 / test_len).collect(),
            predictions: keep_predictions.then_some(predictions),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::PropertyLabel;
    use num_bigint::BigUint;

    fn matrix_from(rows: &[&[u64]]) -> DistanceMatrix {
        let ids: Vec<VertexId> = (1..=rows.len() as u64).map(VertexId).collect();
        let rows: Vec<Vec<BigUint>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
            .collect();
        DistanceMatrix::from_rows(ids, rows).unwrap()
    }

    #[test]
    fn objective_sign_residues() {
        assert_eq!(objective_sign(VertexId(3)), 1);
        assert_eq!(objective_sign(VertexId(7)), 1);
        assert_eq!(objective_sign(VertexId(5)), -1);
    }

    #[test]
    fn sign_of_zero_is_positive() {
        assert_eq!(sign_of(0), 1);
        assert_eq!(sign_of(-3), -1);
        assert_eq!(sign_of(2), 1);
    }

    // distances from vertex 1: (2:1, 3:2, 4:3)
    fn chain() -> DistanceMatrix {
        matrix_from(&[
            &[0, 1, 2, 3],
            &[1, 0, 1, 2],
            &[2, 1, 0, 1],
            &[3, 2, 1, 0],
        ])
    }

    #[test]
    fn knn1_without_ties() {
        let m = chain();
        let train = vec![VertexId(2), VertexId(3), VertexId(4)];
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let nbrs = knn1_neighbors(&m, &train, VertexId(1), 2, &mut rng).unwrap();
        assert_eq!(nbrs, vec![VertexId(2), VertexId(3)]);
    }

    #[test]
    fn knn1_tie_resolution_is_seeded() {
        // vertices 2 and 3 tie at distance 1 from vertex 1
        let m = matrix_from(&[
            &[0, 1, 1, 3],
            &[1, 0, 1, 2],
            &[1, 1, 0, 2],
            &[3, 2, 2, 0],
        ]);
        let train = vec![VertexId(2), VertexId(3), VertexId(4)];
        for seed in 0..8 {
            let mut r1 = ChaCha12Rng::seed_from_u64(seed);
            let mut r2 = ChaCha12Rng::seed_from_u64(seed);
            let a = knn1_neighbors(&m, &train, VertexId(1), 1, &mut r1).unwrap();
            let b = knn1_neighbors(&m, &train, VertexId(1), 1, &mut r2).unwrap();
            assert_eq!(a, b, "deterministic given the seed");
            assert!(a == vec![VertexId(2)] || a == vec![VertexId(3)]);
        }
    }

    #[test]
    fn knn1_whole_training_set() {
        let m = chain();
        let train = vec![VertexId(2), VertexId(3), VertexId(4)];
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let nbrs = knn1_neighbors(&m, &train, VertexId(1), 3, &mut rng).unwrap();
        assert_eq!(nbrs.len(), 3);
    }

    #[test]
    fn knnall_includes_cutoff_ties() {
        // distances from 1: (2:1, 3:2, 4:2, 5:3)
        let m = matrix_from(&[
            &[0, 1, 2, 2, 3],
            &[1, 0, 1, 1, 2],
            &[2, 1, 0, 2, 1],
            &[2, 1, 2, 0, 1],
            &[3, 2, 1, 1, 0],
        ]);
        let train: Vec<VertexId> = [2u64, 3, 4, 5].iter().map(|&v| VertexId(v)).collect();
        let nbrs = knnall_neighbors(&m, &train, VertexId(1), 2).unwrap();
        assert_eq!(nbrs, vec![VertexId(2), VertexId(3), VertexId(4)]);
    }

    #[test]
    fn knnall_without_ties_is_exactly_k() {
        let m = chain();
        let train = vec![VertexId(2), VertexId(3), VertexId(4)];
        let nbrs = knnall_neighbors(&m, &train, VertexId(1), 2).unwrap();
        assert_eq!(nbrs, vec![VertexId(2), VertexId(3)]);
    }

    #[test]
    fn knnall_all_equidistant() {
        let m = matrix_from(&[
            &[0, 5, 5, 5],
            &[5, 0, 5, 5],
            &[5, 5, 0, 5],
            &[5, 5, 5, 0],
        ]);
        let train = vec![VertexId(2), VertexId(3), VertexId(4)];
        let nbrs = knnall_neighbors(&m, &train, VertexId(1), 1).unwrap();
        assert_eq!(nbrs.len(), 3);
    }

    #[test]
    fn small_train_errors() {
        let m = chain();
        let train = vec![VertexId(2)];
        assert!(matches!(
            knnall_neighbors(&m, &train, VertexId(1), 2),
            Err(Error::TrainTooSmall { train: 1, k: 2 })
        ));
    }

    #[test]
    fn predict_votes() {
        let labels: HashMap<VertexId, i8> =
            [(VertexId(1), 1), (VertexId(2), 1), (VertexId(3), -1)].into();
        let vs = |ids: &[u64]| ids.iter().map(|&v| VertexId(v)).collect::<Vec<_>>();
        assert_eq!(predict(&labels, &vs(&[1, 2, 3])).unwrap(), 1);
        assert_eq!(predict(&labels, &vs(&[3])).unwrap(), -1);
        // tie maps to +1
        assert_eq!(predict(&labels, &vs(&[1, 3])).unwrap(), 1);
        assert!(matches!(predict(&labels, &[]), Err(Error::EmptyNeighborList)));
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let vertices: Vec<VertexId> = (1..=100).map(VertexId).collect();
        let split = labeled_split(&vertices, 0.7, 9).unwrap();
        assert_eq!(split.train.len(), 70);
        assert_eq!(split.test.len(), 30);
        let train_set: std::collections::HashSet<_> =
            split.train.iter().map(|&(v, _)| v).collect();
        assert!(split.test.iter().all(|v| !train_set.contains(v)));
    }

    fn uniform_profiles(n: u64) -> Vec<CountProfile> {
        // all vertices share one equivalence class
        let labels: Vec<PropertyLabel> = vec!["p".into()];
        (1..=n)
            .map(|v| {
                let mut p = CountProfile::empty(VertexId(v), labels.clone(), 2);
                p.add(2, "p".into(), 17u32);
                p
            })
            .collect()
    }

    #[test]
    fn single_class_predicts_majority_label() {
        // all profiles equal: every neighbor set is the whole training
        // set for knnall, so the prediction is the global majority (+1)
        let profiles = uniform_profiles(30);
        let config = ExperimentConfig {
            method: Method::KnnAll,
            k_values: vec![1, 2],
            trials: 3,
            split_fraction: 0.7,
            master_seed: 5,
        };
        let report = run_experiment(&profiles, &config).unwrap();
        for (ki, _) in config.k_values.iter().enumerate() {
            for (v, truth, pred) in &report.first_trial_predictions[ki] {
                assert_eq!(*truth, objective_sign(*v));
                assert_eq!(*pred, 1, "majority label is +1");
            }
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let profiles = uniform_profiles(24);
        let config = ExperimentConfig {
            method: Method::Knn1,
            k_values: vec![1, 3],
            trials: 4,
            split_fraction: 0.7,
            master_seed: 11,
        };
        let a = run_experiment(&profiles, &config).unwrap();
        let b = run_experiment(&profiles, &config).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.averages, b.averages);
        assert_eq!(a.trial_seeds, b.trial_seeds);
    }

    #[test]
    fn error_rates_lie_in_unit_interval() {
        let profiles = uniform_profiles(40);
        let config = ExperimentConfig {
            method: Method::KnnAll,
            k_values: vec![1, 2, 5],
            trials: 5,
            split_fraction: 0.6,
            master_seed: 3,
        };
        let report = run_experiment(&profiles, &config).unwrap();
        assert!(report
            .rows
            .iter()
            .flatten()
            .all(|&e| (0.0..=1.0).contains(&e)));
        for i in 0..config.k_values.len() {
            let mean = report.rows.iter().map(|r| r[i]).sum::<f64>() / config.trials as f64;
            assert!((mean - report.averages[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_split_errors() {
        let profiles = uniform_profiles(3);
        let config = ExperimentConfig {
            method: Method::KnnAll,
            k_values: vec![1],
            trials: 1,
            split_fraction: 0.99,
            master_seed: 0,
        };
        assert!(matches!(
            run_experiment(&profiles, &config),
            Err(Error::DegenerateSplit(_))
        ));
    }

    #[test]
    fn table_csv_shape() {
        let profiles = uniform_profiles(20);
        let config = ExperimentConfig {
            method: Method::KnnAll,
            k_values: vec![1, 2],
            trials: 2,
            split_fraction: 0.7,
            master_seed: 1,
        };
        let report = run_experiment(&profiles, &config).unwrap();
        let mut buf = Vec::new();
        report.write_table_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trial,k=1,k=2");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("average,"));
    }
}
