use std::collections::BTreeSet;

use astarlab_core::analysis::{detect_approximated_tie, verify_usp_margin};
use astarlab_core::instances::{
    all_pairs, delta_from_x, gen_labeling_clique, gen_labeling_grid, gen_linf_clique, gen_linf_grid, gen_lp_lb,
    gen_random_usp, random_delta, random_x, read_bundle, recover_delta, shortest_path_vertices, write_bundle,
    CliqueLayout, GridLayout, InstanceBundle, LpLayout, WeightMode,
};
use astarlab_core::search::{dijkstra, max_hop_shortest_path};
use astarlab_core::Weight;
use num_bigint::BigInt;
use proptest::prelude::*;

fn clique_edges_are_strict_unique_paths(b: &InstanceBundle, m: usize) {
    let d = all_pairs(&b.graph);
    for i in 0..m {
        for j in i + 1..m {
            let w = b.graph.weight(i, j).unwrap();
            assert_eq!(&d[i][j], w);
            // Every other route leaves through some a_l, l != j.
            for l in (0..m).filter(|&l| l != i && l != j) {
                assert!(&(&d[i][l] + &d[l][j]) > w, "({i}, {j}) via {l}");
            }
            assert_eq!(shortest_path_vertices(&d[i], &d[j], w), vec![i, j]);
        }
    }
}

#[test]
fn lp_lb_structure() {
    let b = gen_lp_lb(4).unwrap();
    assert_eq!(b.graph.n(), 35);
    assert_eq!(b.param_int("vertices"), Some(35));
    let lay = LpLayout { n: 4, bits: 2 };
    for i in 1..=2 {
        let pair = b.family(&format!("pair/{i}"));
        assert_eq!(pair, &[lay.a(i), lay.abar(i)]);
        assert_eq!(dijkstra(&b.graph, lay.a(i)).0[lay.abar(i)], Weight::integer(4));
    }
    for &c in b.family("star-leaves") {
        for i in 1..=2 {
            let adj = [lay.a(i), lay.abar(i)].iter().filter(|&&v| b.graph.weight(c, v).is_some()).count();
            assert_eq!(adj, 1);
        }
    }
    let queries = b.query_family("aux-to-abar");
    assert!(!queries.is_empty());
    for &(s, t) in queries {
        assert!(max_hop_shortest_path(&b.graph, s, t).hops <= 8);
    }
}

#[test]
fn lp_lb_size_grows_like_n_log_n() {
    for n in [2usize, 4, 8, 16, 32] {
        let v = gen_lp_lb(n).unwrap().graph.n();
        let bits = n.trailing_zeros() as usize;
        assert_eq!(v, (n + 1) + 2 * bits + bits * (1 + n + n) + bits * n, "n = {n}");
    }
}

#[test]
fn linf_clique_deterministic_example() {
    let b = gen_linf_clique(3, 2, WeightMode::Deterministic).unwrap();
    let eps = Weight::new(1, 729);
    assert_eq!(b.param_weight("epsilon"), Some(eps.clone()));
    assert_eq!(b.graph.n(), 3 + 3 * 2);
    let vertices = Weight::integer(b.graph.n() as i64);
    assert_eq!(b.param_weight("w0"), Some(&eps / &(Weight::integer(16) * vertices)));
    let u: Vec<Weight> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| b.graph.weight(i, j).unwrap() - &Weight::integer(10))
        .collect();
    assert_eq!(u, vec![Weight::new(1, 729), Weight::new(9, 729), Weight::new(81, 729)]);
    let weights: Vec<Weight> = u.iter().map(|x| x + &Weight::integer(10)).collect();
    assert_eq!(detect_approximated_tie(&weights, &eps, 4).unwrap(), None);
    clique_edges_are_strict_unique_paths(&b, 3);
}

#[test]
fn linf_clique_random_mode_certifies_or_refuses() {
    let eps = Weight::new(1, 1 << 24);
    let b = gen_linf_clique(3, 3, WeightMode::Random { seed: 9, epsilon: eps.clone() }).unwrap();
    assert_eq!(b.param_weight("epsilon"), Some(eps));
    clique_edges_are_strict_unique_paths(&b, 3);
    // With a huge tolerance every draw has a tie.
    let wide = WeightMode::Random { seed: 9, epsilon: Weight::new(1, 2) };
    assert!(gen_linf_clique(4, 3, wide).is_err());
}

#[test]
fn labeling_clique_examples() {
    let zero = vec![vec![0u64; 3]; 3];
    let b = gen_labeling_clique(3, 2, 2, &zero, true).unwrap();
    for (i, j) in (CliqueLayout { m: 3, k: 2 }).pairs() {
        assert_eq!(b.graph.weight(i, j), Some(&Weight::integer(22)));
    }
    clique_edges_are_strict_unique_paths(&b, 3);

    let lay = CliqueLayout { m: 2, k: 1 };
    let b = gen_labeling_clique(2, 1, 2, &[vec![0, 3], vec![3, 0]], true).unwrap();
    assert_eq!(b.graph.weight(0, 1), Some(&Weight::integer(40)));
    assert_eq!(dijkstra(&b.graph, lay.leaf(0, 0)).0[lay.leaf(1, 0)], Weight::integer(42));

    for bits in 2..5 {
        let delta = random_delta(5, bits, u64::from(bits));
        let b = gen_labeling_clique(5, 1, bits, &delta, true).unwrap();
        clique_edges_are_strict_unique_paths(&b, 5);
    }
    assert!(gen_labeling_clique(3, 2, 2, &zero, false).is_err());
}

#[test]
fn grid_sizes_and_routes() {
    for (m, k) in [(2usize, 1usize), (3, 2), (4, 1)] {
        let b = gen_linf_grid(m, k, WeightMode::Deterministic).unwrap();
        assert_eq!(b.graph.n(), m * m + 2 * m * k);
        let lay = GridLayout { m, k };
        let v = |c| b.vertex_of(c).unwrap();
        for i in 0..m as i64 {
            let ds = dijkstra(&b.graph, v((i, -1))).0;
            for j in 0..m as i64 {
                let t = v((-1, j));
                let dt = dijkstra(&b.graph, t).0;
                let on: BTreeSet<usize> = shortest_path_vertices(&ds, &dt, &ds[t]).into_iter().collect();
                let want: BTreeSet<usize> = lay.route(i, 1, 1, j).into_iter().map(v).collect();
                assert_eq!(on, want, "m {m} k {k} ({i}, {j})");
            }
        }
    }
}

#[test]
fn labeling_grid_zero_offsets() {
    let b = gen_labeling_grid(2, 1, 2, &[0; 4]).unwrap();
    let (spec, _) = b.grid.as_ref().unwrap();
    let n = b.graph.n() as i64;
    assert_eq!(n, 8);
    for (&(x, y), w) in &spec.cells {
        if GridLayout::in_r((x, y)) {
            assert_eq!(w, &Weight::integer((n - x) * n.pow(4) - 2));
        } else {
            assert_eq!(w, &Weight::one());
        }
    }
}

/// Sum of `δ` over the cells `(i, 0), .., (i, j), (i - 1, j), .., (0, j)`.
fn route_sum(delta: &[Vec<i64>], i: usize, j: usize) -> i64 {
    let mut cells: Vec<(usize, usize)> = (0..=j).map(|y| (i, y)).collect();
    cells.extend((0..i).rev().map(|x| (x, j)));
    cells.iter().map(|&(x, y)| delta[x][y]).sum()
}

#[test]
fn delta_examples() {
    assert!(delta_from_x(&[0; 9], 3, 2).unwrap().iter().flatten().all(|&d| d == 0));
    let x = [1, 2, 3, 4];
    let d = delta_from_x(&x, 2, 3).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(route_sum(&d, i, j), x[i * 2 + j]);
        }
    }
}

#[test]
fn delta_recovery_on_small_grids() {
    for (m, seed) in [(2usize, 1u64), (2, 2), (3, 3)] {
        let x = random_x(m, 2, seed);
        let b = gen_labeling_grid(m, 2, 2, &x).unwrap();
        for i in 0..m {
            let ds = dijkstra(&b.graph, b.vertex_of((i as i64, -1)).unwrap()).0;
            for j in 0..m {
                let d = &ds[b.vertex_of((-1, j as i64)).unwrap()];
                assert_eq!(recover_delta(&b, d, i, j), Some(BigInt::from(x[i * m + j])));
            }
        }
    }
}

#[test]
fn usp_examples() {
    let two = gen_random_usp(2, 1.0, None, &Weight::integer(3), 0).unwrap();
    assert_eq!(two.graph.edge_count(), 1);
    let dense = gen_random_usp(10, 0.9, None, &Weight::integer(3), 3).unwrap();
    assert!(verify_usp_margin(&dense.graph, &Weight::integer(3)).pass);
    assert_eq!(
        dense.param_weight("realized-margin"),
        verify_usp_margin(&dense.graph, &Weight::integer(3)).min_margin
    );
}

#[test]
fn usp_draws_are_almost_always_tie_free() {
    let p = astarlab_core::instances::default_edge_probability(20);
    let clean = (0..100)
        .filter(|&seed| {
            let b = gen_random_usp(20, p, None, &Weight::new(1, 1000), seed).unwrap();
            b.param_int("tie-rejections") == Some(0)
        })
        .count();
    assert!(clean >= 99, "{clean}/100");
}

#[test]
fn bundles_round_trip_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let bundles = [
        gen_lp_lb(4).unwrap(),
        gen_linf_clique(3, 2, WeightMode::Deterministic).unwrap(),
        gen_linf_grid(2, 1, WeightMode::Deterministic).unwrap(),
        gen_random_usp(12, 0.4, None, &Weight::integer(2), 5).unwrap(),
    ];
    for (i, b) in bundles.iter().enumerate() {
        let path = dir.path().join(i.to_string());
        write_bundle(b, &path).unwrap();
        assert_eq!(&read_bundle(&path).unwrap(), b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_path_sums_reproduce_x(m in 1usize..5, b in 1u32..4, seed in 0u64..1000) {
        let x = random_x(m, b, seed);
        let d = delta_from_x(&x, m, b).unwrap();
        for i in 0..m {
            for j in 0..m {
                prop_assert_eq!(route_sum(&d, i, j), x[i * m + j]);
            }
        }
    }

    #[test]
    fn usp_margin_holds_at_declared_value(n in 3usize..14, seed in 0u64..1000, c in 1i64..6) {
        let b = gen_random_usp(n, 0.5, None, &Weight::integer(c), seed).unwrap();
        prop_assert!(verify_usp_margin(&b.graph, &Weight::integer(c)).pass);
    }
}
