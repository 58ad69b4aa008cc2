//! The analytic congruence paths (neighborhoods, count profiles, edge
//! counts) checked exactly against full enumeration on every instance
//! small enough to enumerate.

use std::collections::BTreeSet;

use hypermetric::congruence::{
    BlockRule, CongruenceBlock, CongruenceSpec, Example1Spec, Example2Spec,
    GeneralCongruenceSpec, ImplicitHypergraph,
};
use hypermetric::VertexId;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

const CAP: u64 = 100_000;

fn assert_analytic_matches_enumeration(ih: &ImplicitHypergraph) {
    let explicit = ih.enumerate(CAP).expect("instance fits under the cap");
    assert_eq!(
        BigUint::from(explicit.edges().len() as u64),
        ih.edge_count_summary().total
    );
    for &v in ih.vertices() {
        let analytic_nb: BTreeSet<VertexId> =
            ih.analytic_neighborhood(v).unwrap().into_iter().collect();
        let brute_nb = explicit.neighborhood(v).unwrap();
        assert_eq!(analytic_nb, brute_nb, "neighborhood of {v}");
        let analytic_p = ih.analytic_count_profile(v).unwrap();
        let brute_p = explicit.count_profile(v).unwrap();
        assert!(
            analytic_p.equivalent(&brute_p),
            "profile of {v}: analytic {:?} vs enumerated {:?}",
            analytic_p,
            brute_p
        );
    }
}

#[test]
fn example1_matches_enumeration_up_to_60() {
    for n in [12u64, 30, 60] {
        let ih = ImplicitHypergraph::build(CongruenceSpec::Example1(Example1Spec::new(n))).unwrap();
        assert_analytic_matches_enumeration(&ih);
    }
}

#[test]
fn example2_small_instances_match_enumeration() {
    for (seed, umax, ssz) in [(1u64, 60u64, 40u64), (2, 120, 50), (3, 200, 64)] {
        let spec = Example2Spec {
            universe_max: umax,
            sample_size: ssz,
            seed,
            ..Default::default()
        };
        let ih = ImplicitHypergraph::build(CongruenceSpec::Example2(spec)).unwrap();
        assert_analytic_matches_enumeration(&ih);
    }
}

fn random_general_spec(rng: &mut impl Rng) -> GeneralCongruenceSpec {
    let n_blocks = rng.gen_range(1..=3);
    let mut next_vertex = 0u64;
    let mut blocks = Vec::new();
    for _ in 0..n_blocks {
        let m = rng.gen_range(4..=18u64);
        let vertices: Vec<u64> = (next_vertex..next_vertex + m).collect();
        next_vertex += m + rng.gen_range(0..5);
        let s_max = rng.gen_range(2..=3.min(m as usize));
        let rules = (2..=s_max)
            .map(|size| {
                let modulus = rng.gen_range(2..=7u64);
                let n_res = rng.gen_range(1..=2usize);
                let residues = (0..n_res)
                    .map(|_| rng.gen_range(-3..=(modulus as i64) + 2))
                    .collect();
                BlockRule {
                    size,
                    modulus,
                    residues,
                }
            })
            .collect();
        blocks.push(CongruenceBlock { vertices, rules });
    }
    let label_modulus = if rng.gen_bool(0.7) {
        Some(rng.gen_range(2..=5))
    } else {
        None
    };
    GeneralCongruenceSpec {
        blocks,
        label_modulus,
    }
}

#[test]
fn random_general_specs_match_enumeration() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5EED);
    for _ in 0..20 {
        let spec = random_general_spec(&mut rng);
        let ih = ImplicitHypergraph::build(CongruenceSpec::General(spec)).unwrap();
        assert_analytic_matches_enumeration(&ih);
    }
}

#[test]
fn pool_soundness_on_example1() {
    // every enumerated edge obeys the congruence rules; every admissible
    // subset of a pool appears as an edge
    let ih = ImplicitHypergraph::build(CongruenceSpec::Example1(Example1Spec::new(30))).unwrap();
    let explicit = ih.enumerate(CAP).unwrap();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    for (vs, _) in explicit.edges() {
        let vals: Vec<u64> = vs.iter().map(|v| v.0).collect();
        match vals.len() {
            2 => assert_eq!(vals[0] % 2, vals[1] % 2, "pairs share parity"),
            m => {
                let m64 = m as u64;
                let want = m64 % 3;
                assert!(
                    vals.iter().all(|&v| v % m64 == want),
                    "size-{m} edge {vals:?} violates its residue rule"
                );
            }
        }
        seen.insert(vals);
    }
    // spot-check completeness: all same-parity pairs are edges
    for a in 1..=30u64 {
        for b in (a + 1)..=30 {
            if a % 2 == b % 2 {
                assert!(seen.contains(&vec![a, b]), "missing pair {a},{b}");
            }
        }
    }
}

#[test]
fn general_edges_never_span_blocks() {
    let spec = GeneralCongruenceSpec {
        blocks: vec![
            CongruenceBlock {
                vertices: (0..12).collect(),
                rules: vec![BlockRule {
                    size: 2,
                    modulus: 2,
                    residues: vec![0, 1],
                }],
            },
            CongruenceBlock {
                vertices: (100..112).collect(),
                rules: vec![BlockRule {
                    size: 2,
                    modulus: 2,
                    residues: vec![0, 1],
                }],
            },
        ],
        label_modulus: Some(3),
    };
    let ih = ImplicitHypergraph::build(CongruenceSpec::General(spec)).unwrap();
    let explicit = ih.enumerate(CAP).unwrap();
    assert!(!explicit.edges().is_empty());
    for (vs, _) in explicit.edges() {
        let in_first = vs.iter().all(|v| v.0 < 12);
        let in_second = vs.iter().all(|v| v.0 >= 100);
        assert!(in_first || in_second, "edge {vs:?} spans blocks");
    }
}

#[test]
fn every_enumerated_edge_is_labeled() {
    // labels are total: each edge carries exactly one label from the set
    let spec = Example2Spec {
        universe_max: 80,
        sample_size: 40,
        seed: 9,
        ..Default::default()
    };
    let ih = ImplicitHypergraph::build(CongruenceSpec::Example2(spec)).unwrap();
    let explicit = ih.enumerate(CAP).unwrap();
    for (_, label) in explicit.edges() {
        assert!(explicit.property_set().contains(label));
    }
}
