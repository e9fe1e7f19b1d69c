mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use astarlab_core::graph::graph_from_ints;
use astarlab_core::heuristics::{build_beacon_embedding, HeuristicSpec};
use astarlab_core::instances::gen_random_usp;
use astarlab_core::search::{
    astar, dijkstra, euler_tour_of, is_valid_euler_labeling, max_hop_shortest_path, scan_sets,
    second_shortest_simple_path, TiePolicy,
};
use astarlab_core::Weight;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn trivial_queries() {
    let g = graph_from_ints(2, &[(0, 1, 1)]).unwrap();
    let p = max_hop_shortest_path(&g, 1, 1);
    assert_eq!((p.length, p.hops, p.vertices), (Weight::zero(), 0, vec![1]));
    assert_eq!(second_shortest_simple_path(&g, 0, 1), None);
    assert_eq!(dijkstra(&g, 0).0, vec![Weight::zero(), Weight::one()]);
}

#[test]
fn square_cycle_examples() {
    let unit = graph_from_ints(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
    let p = max_hop_shortest_path(&unit, 0, 2);
    assert_eq!((p.length, p.hops), (Weight::integer(2), 2));
    assert_eq!(p.vertices, vec![0, 1, 2]);
    let heavy = graph_from_ints(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 2)]).unwrap();
    assert_eq!(second_shortest_simple_path(&heavy, 0, 3), Some(Weight::integer(3)));
    assert_eq!(second_shortest_simple_path(&heavy, 3, 0), Some(Weight::integer(3)));
}

#[test]
fn triangle_second_path_is_the_direct_edge() {
    let g = graph_from_ints(3, &[(0, 1, 1), (1, 2, 2), (0, 2, 7)]).unwrap();
    assert_eq!(second_shortest_simple_path(&g, 0, 2), Some(Weight::integer(7)));
    let p = max_hop_shortest_path(&g, 0, 2);
    assert_eq!(p.vertices, vec![0, 1, 2]);
}

#[test]
fn exact_heuristic_scans_only_the_path_on_usp_graphs() {
    for seed in 0..5 {
        let g = gen_random_usp(24, 0.25, None, &Weight::integer(1), seed).unwrap().graph;
        for (s, t) in [(0, 23), (5, 17), (12, 3)] {
            let path = max_hop_shortest_path(&g, s, t);
            for tie in TiePolicy::ALL {
                let trace = astar(&g, s, t, &HeuristicSpec::Exact, tie).unwrap();
                assert_eq!(trace.scanned, path.vertices, "seed {seed} ({s},{t}) {tie:?}");
                assert_eq!(trace.dist, path.length);
            }
            let sets = scan_sets(&g, s, t, &HeuristicSpec::Exact).unwrap();
            assert_eq!(sets.optimal, sorted(&path.vertices));
        }
    }
}

#[test]
fn euler_tour_of_a_path_nests_strictly() {
    let parent = vec![0, 0, 1, 2, 3];
    let pos = euler_tour_of(&parent, 0);
    assert!(is_valid_euler_labeling(&pos));
    for v in 1..5 {
        assert!(pos[v - 1].0 < pos[v].0 && pos[v].1 < pos[v - 1].1);
    }
    assert_eq!(pos[0], (1, 10));
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_hop_path_matches_brute_force(seed in 0u64..10_000, n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected(n, 0.4, 3, &mut rng);
        let (s, t) = (0, n - 1);
        let paths = common::simple_paths(&g, s, t);
        let best = paths[0].0.clone();
        let hops = paths.iter().filter(|p| p.0 == best).map(|p| p.1).max().unwrap();
        let got = max_hop_shortest_path(&g, s, t);
        prop_assert_eq!(&got.length, &best);
        prop_assert_eq!(got.hops, hops);
        prop_assert_eq!(got.vertices.len(), hops + 1);
        let walked: Weight = got.vertices.windows(2).map(|e| g.weight(e[0], e[1]).unwrap().clone()).sum();
        prop_assert_eq!(walked, best);
        prop_assert_eq!(second_shortest_simple_path(&g, s, t), paths.get(1).map(|p| p.0.clone()));
    }

    #[test]
    fn dijkstra_tree_gives_a_valid_tour(seed in 0u64..10_000, n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = if n == 1 {
            graph_from_ints(1, &[]).unwrap()
        } else {
            common::random_connected(n, 0.15, 5, &mut rng)
        };
        let (dist, tree) = dijkstra(&g, 0);
        prop_assert!(is_valid_euler_labeling(&tree.euler_pos));
        for v in 0..n {
            let path = tree.path_to(v);
            let len: Weight = path.windows(2).map(|e| g.weight(e[0], e[1]).unwrap().clone()).sum();
            prop_assert_eq!(&len, &dist[v]);
            for &u in &path[..path.len() - 1] {
                prop_assert!(tree.is_ancestor(u, v));
            }
        }
    }

    #[test]
    fn astar_scans_between_must_and_may(seed in 0u64..10_000, n in 2usize..20, beacons in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected(n, 0.3, 3, &mut rng);
        let b: Vec<usize> = (0..beacons.min(n)).collect();
        let h = HeuristicSpec::Beacon(Arc::new(build_beacon_embedding(&g, &b).unwrap()));
        let (s, t) = ((seed as usize) % n, (seed as usize / 7) % n);
        let sets = scan_sets(&g, s, t, &h).unwrap();
        let (must, may): (BTreeSet<_>, BTreeSet<_>) =
            (sets.must.iter().copied().collect(), sets.may.iter().copied().collect());
        prop_assert!(must.is_subset(&may));
        let dist = dijkstra(&g, s).0;
        for tie in TiePolicy::ALL {
            let trace = astar(&g, s, t, &h, tie).unwrap();
            prop_assert_eq!(&trace.dist, &dist[t]);
            prop_assert_eq!(trace.scanned.first(), Some(&s));
            prop_assert_eq!(trace.scanned.last(), Some(&t));
            let scanned: BTreeSet<usize> = trace.scanned.iter().copied().collect();
            prop_assert!(must.iter().filter(|&&u| u != t).all(|u| scanned.contains(u)));
            prop_assert!(scanned.is_subset(&may));
            // A consistent heuristic settles every popped vertex at its true distance.
            for (u, d) in trace.scanned.iter().zip(&trace.settled_dist) {
                prop_assert_eq!(d, &dist[*u]);
            }
        }
    }

    #[test]
    fn zero_heuristic_pops_in_distance_order(seed in 0u64..10_000, n in 2usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected(n, 0.2, 4, &mut rng);
        let trace = astar(&g, 0, n - 1, &HeuristicSpec::Zero, TiePolicy::Fifo).unwrap();
        prop_assert!(trace.settled_dist.windows(2).all(|w| w[0] <= w[1]));
        let dist = dijkstra(&g, 0).0;
        let below: BTreeSet<usize> = (0..n).filter(|&u| dist[u] < dist[n - 1]).collect();
        let scanned: BTreeSet<usize> = trace.scanned.iter().copied().collect();
        prop_assert!(below.is_subset(&scanned));
    }
}
