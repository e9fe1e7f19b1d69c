mod common;

use std::sync::Arc;

use astarlab_core::analysis::{check_admissibility, check_consistency, check_subadditivity};
use astarlab_core::graph::graph_from_ints;
use astarlab_core::heuristics::{
    as_label_table, build_beacon_embedding, build_tiebreak_embedding, evaluate_exact, evaluate_tiebreak,
    sample_beacons, HeuristicSpec, NormP,
};
use astarlab_core::instances::{all_pairs, gen_random_usp};
use astarlab_core::search::{dijkstra, is_valid_euler_labeling};
use astarlab_core::Weight;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn beacon(g: &astarlab_core::Graph, b: &[usize]) -> HeuristicSpec {
    HeuristicSpec::Beacon(Arc::new(build_beacon_embedding(g, b).unwrap()))
}

#[test]
fn path_beacon_value() {
    let g = graph_from_ints(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
    let h = beacon(&g, &[0]);
    assert_eq!(evaluate_exact(&h, &g, 1, 2).unwrap(), Weight::one());
    for u in 0..3 {
        assert_eq!(evaluate_exact(&h, &g, u, u).unwrap(), Weight::zero());
    }
}

#[test]
fn triangle_beacon_coordinates() {
    let g = graph_from_ints(3, &[(0, 1, 1), (1, 2, 2), (0, 2, 7)]).unwrap();
    let emb = build_beacon_embedding(&g, &[0]).unwrap();
    let col: Vec<Weight> = emb.pi0.iter().map(|r| r[0].clone()).collect();
    assert_eq!(col, vec![Weight::integer(0), Weight::integer(1), Weight::integer(3)]);
}

#[test]
fn beacon_at_the_target_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = common::random_connected(15, 0.2, 6, &mut rng);
    for t in [0, 7, 14] {
        let h = beacon(&g, &[t]);
        let d = dijkstra(&g, t).0;
        for u in 0..g.n() {
            assert_eq!(evaluate_exact(&h, &g, u, t).unwrap(), d[u]);
        }
    }
}

#[test]
fn five_vertex_tree_positions() {
    // a=0 with children b=1, e=4; b with children c=2, d=3.
    let g = graph_from_ints(5, &[(0, 1, 1), (0, 4, 1), (1, 2, 1), (1, 3, 1)]).unwrap();
    let emb = build_tiebreak_embedding(&g, &[0]).unwrap();
    let col: Vec<(usize, usize)> = emb.pi1.as_ref().unwrap().iter().map(|r| r[0]).collect();
    assert_eq!(col, vec![(1, 10), (2, 7), (3, 4), (5, 6), (8, 9)]);
}

#[test]
fn path_from_an_endpoint_nests_strictly() {
    let g = graph_from_ints(5, &[(0, 1, 2), (1, 2, 1), (2, 3, 3), (3, 4, 1)]).unwrap();
    let emb = build_tiebreak_embedding(&g, &[0]).unwrap();
    let col: Vec<(usize, usize)> = emb.pi1.as_ref().unwrap().iter().map(|r| r[0]).collect();
    for v in 1..5 {
        assert!(col[v - 1].0 < col[v].0 && col[v].1 < col[v - 1].1);
    }
}

#[test]
fn tiebreak_on_usp_graphs() {
    for seed in 0..3 {
        let g = gen_random_usp(20, 0.25, None, &Weight::integer(3), seed).unwrap().graph;
        let b = sample_beacons(20, 4, seed).unwrap();
        let emb = build_tiebreak_embedding(&g, &b).unwrap();
        for i in 0..4 {
            assert!(is_valid_euler_labeling(&emb.euler_column(i).unwrap()));
        }
        let plain = build_beacon_embedding(&g, &b).unwrap();
        let dist = all_pairs(&g);
        let h = HeuristicSpec::BeaconTieBreak(Arc::new(emb.clone()));
        for s in 0..20 {
            assert_eq!(evaluate_tiebreak(&emb, s, s).unwrap(), Weight::zero());
            for t in 0..20 {
                let value = evaluate_tiebreak(&emb, s, t).unwrap();
                assert_eq!(evaluate_exact(&h, &g, s, t).unwrap(), value);
                // A beacon whose tree has s above t gives the exact distance.
                for (i, &bi) in b.iter().enumerate() {
                    let (ds, dt) = (&plain.pi0[s][i], &plain.pi0[t][i]);
                    if s != t && &(ds + &dist[s][t]) == dt && bi != t {
                        assert!(value >= dist[s][t]);
                    }
                }
                if s != t {
                    let bound = (0..4)
                        .map(|i| (&plain.pi0[s][i] - &plain.pi0[t][i]).abs())
                        .fold(Weight::zero(), Weight::max);
                    assert!(bound <= value && value <= &bound + &Weight::integer(2));
                }
            }
        }
    }
}

#[test]
fn sampled_beacon_frequencies() {
    let mut counts = [0u32; 5];
    for seed in 0..10_000 {
        for v in sample_beacons(5, 2, seed).unwrap() {
            counts[v] += 1;
        }
    }
    // Binomial(10^4, 2/5): mean 4000, sigma ~49.
    for c in counts {
        assert!((c as i64 - 4000).abs() <= 147, "{counts:?}");
    }
    assert_eq!(sample_beacons(10, 1, 77).unwrap(), sample_beacons(10, 1, 77).unwrap());
    assert_eq!(sample_beacons(6, 6, 1).unwrap(), (0..6).collect::<Vec<_>>());
}

#[test]
fn label_table_views_match_the_heuristics() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let g = common::random_connected(15, 0.25, 7, &mut rng);
    let b = [1, 6, 11];
    let plain = beacon(&g, &b);
    let tb = HeuristicSpec::BeaconTieBreak(Arc::new(build_tiebreak_embedding(&g, &b).unwrap()));
    let t_plain = as_label_table(&plain, &g).unwrap();
    let t_tb = as_label_table(&tb, &g).unwrap();
    assert_eq!(t_plain.label_length(), 3);
    assert_eq!(t_tb.label_length(), 9);
    let diameter = all_pairs(&g).into_iter().flatten().max().unwrap();
    let limit = BigInt::from(30).max(diameter.numer().clone());
    for row in &t_tb.labels {
        assert!(row.iter().all(|x| *x <= limit && *x <= t_tb.cap));
    }
    let as_table = |t| HeuristicSpec::LabelTable(Arc::new(t));
    let (lp, lt) = (as_table(t_plain), as_table(t_tb));
    for s in 0..15 {
        for t in 0..15 {
            assert_eq!(evaluate_exact(&lp, &g, s, t).unwrap(), evaluate_exact(&plain, &g, s, t).unwrap());
            assert_eq!(evaluate_exact(&lt, &g, s, t).unwrap(), evaluate_exact(&tb, &g, s, t).unwrap());
        }
    }
}

#[test]
fn infinity_norm_equals_beacon() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = common::random_connected(12, 0.3, 5, &mut rng);
    let emb = Arc::new(build_beacon_embedding(&g, &[0, 4, 9]).unwrap());
    let norm = HeuristicSpec::Norm {
        p: NormP::Infinity,
        emb: emb.clone(),
        gap: Weight::zero(),
    };
    let b = HeuristicSpec::Beacon(emb);
    for s in 0..12 {
        for t in 0..12 {
            assert_eq!(evaluate_exact(&norm, &g, s, t).unwrap(), evaluate_exact(&b, &g, s, t).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn beacon_is_consistent_admissible_and_subadditive(seed in 0u64..10_000, n in 2usize..15, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected(n, 0.3, 5, &mut rng);
        let b = sample_beacons(n, k.min(n), seed).unwrap();
        let h = beacon(&g, &b);
        let all: Vec<usize> = (0..n).collect();
        let pairs: Vec<(usize, usize)> = all.iter().flat_map(|&s| all.iter().map(move |&t| (s, t))).collect();
        let triples: Vec<(usize, usize, usize)> =
            pairs.iter().flat_map(|&(u, v)| (0..n).map(move |w| (u, v, w))).collect();
        prop_assert!(check_consistency(&g, &h, &all).unwrap().is_empty());
        prop_assert!(check_admissibility(&g, &h, &pairs).unwrap().is_empty());
        prop_assert!(check_subadditivity(&g, &h, &triples).unwrap().is_empty());
    }

    #[test]
    fn finite_norms_are_subadditive(seed in 0u64..10_000, n in 2usize..10, p in 1u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected(n, 0.3, 5, &mut rng);
        let b = sample_beacons(n, 2.min(n), seed).unwrap();
        let h = HeuristicSpec::Norm {
            p: NormP::Finite(p),
            emb: Arc::new(build_beacon_embedding(&g, &b).unwrap()),
            gap: Weight::zero(),
        };
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|u| (0..n).flat_map(move |v| (0..n).map(move |w| (u, v, w))))
            .collect();
        prop_assert!(check_subadditivity(&g, &h, &triples).unwrap().is_empty());
    }
}
