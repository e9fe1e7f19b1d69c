mod common;

use astarlab_core::graph::graph_from_ints;
use astarlab_core::instances::gen_labeling_clique;
use astarlab_core::search::dijkstra;
use astarlab_core::{
    build_graph, graph_to_grid, grid_to_graph, parse_graph_file, parse_grid, serialize_graph, serialize_grid, GraphError,
    GridSpec, ParseError, Weight,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn w(n: i64, d: i64) -> Weight {
    Weight::new(n, d)
}

#[test]
fn triangle_loads_and_routes_through_middle() {
    let g = parse_graph_file("3 3\n0 1 1\n1 2 2/1\n0 2 7\n").unwrap();
    assert_eq!(dijkstra(&g, 0).0[2], Weight::integer(3));
}

#[test]
fn disconnected_and_nonpositive_inputs_fail() {
    assert!(matches!(
        build_graph(3, vec![(0, 1, Weight::one())]),
        Err(GraphError::Disconnected(2))
    ));
    assert!(matches!(
        parse_graph_file("2 1\n0 1 -1/2\n"),
        Err(ParseError::Invalid(GraphError::NonPositiveWeight { .. }))
    ));
}

#[test]
fn labeling_clique_survives_a_file_round_trip() {
    let delta = vec![vec![0, 3], vec![3, 0]];
    let bundle = gen_labeling_clique(2, 1, 2, &delta, true).unwrap();
    let back = parse_graph_file(&serialize_graph(&bundle.graph)).unwrap();
    assert_eq!(back.n(), bundle.graph.n());
    assert!(back.edges().eq(bundle.graph.edges()));
}

#[test]
fn two_by_two_grid_diagonal_is_the_cheaper_route() {
    let ints = |r: [i64; 2]| r.iter().map(|&x| Weight::integer(x)).collect::<Vec<_>>();
    let spec = GridSpec::rectangle(vec![ints([1, 2]), ints([3, 4])], []).unwrap();
    let (g, idx) = grid_to_graph(&spec).unwrap();
    let mut weights: Vec<Weight> = g.edges().map(|(_, _, x)| x.clone()).collect();
    weights.sort();
    // Adjacent cell sums 1+2, 1+3, 2+4, 3+4; 5/2 would need the diagonal 1-4.
    assert_eq!(weights, vec![w(3, 2), w(2, 1), w(3, 1), w(7, 2)]);

    // Cells in display order: (1,1)=1, (0,1)=2, (1,0)=3, (0,0)=4.
    let path_cost = |cells: &[i64]| -> Weight {
        let total: i64 = cells.iter().sum();
        Weight::integer(total) - w(cells[0] + cells[cells.len() - 1], 2)
    };
    let oracle = path_cost(&[1, 2, 4]).min(path_cost(&[1, 3, 4]));
    let (a, b) = (idx.vertex((1, 1)), idx.vertex((0, 0)));
    assert_eq!(dijkstra(&g, a).0[b], oracle);
    assert_eq!(oracle, w(9, 2));
}

#[test]
fn blocked_grid_edge_disappears() {
    let ones = || vec![Weight::one(), Weight::one()];
    let spec = GridSpec::rectangle(vec![ones(), ones()], [((1, 1), (0, 1))]).unwrap();
    let (g, _) = grid_to_graph(&spec).unwrap();
    assert_eq!((g.n(), g.edge_count()), (4, 3));
    assert!(g.edges().all(|(_, _, x)| *x == Weight::one()));
}

#[test]
fn grid_file_round_trip_keeps_the_graph() {
    let row = |xs: [i64; 3]| xs.iter().map(|&x| Weight::new(x, 3)).collect::<Vec<_>>();
    let spec = GridSpec::rectangle(vec![row([1, 2, 3]), row([4, 5, 6])], [((0, 0), (1, 0))]).unwrap();
    let back = parse_grid(&serialize_grid(&spec)).unwrap();
    assert_eq!(back, spec);
    assert_eq!(grid_to_graph(&back).unwrap().0, grid_to_graph(&spec).unwrap().0);
}

#[test]
fn graph_back_to_grid_recovers_blocked_pairs() {
    let row = |xs: [i64; 3]| xs.iter().map(|&x| Weight::new(x, 2)).collect::<Vec<_>>();
    let spec = GridSpec::rectangle(vec![row([1, 2, 3]), row([4, 5, 6])], [((1, 0), (1, 1))]).unwrap();
    let (g, idx) = grid_to_graph(&spec).unwrap();
    let cells: Vec<_> = idx.cell_of.iter().map(|c| (*c, spec.cells[c].clone())).collect();
    assert_eq!(graph_to_grid(&g, &cells).unwrap(), spec);

    let mut wrong = cells.clone();
    wrong[0].1 = Weight::integer(9);
    assert!(graph_to_grid(&g, &wrong).is_err());
}

proptest! {
    #[test]
    fn weight_text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = Weight::new(n, d);
        prop_assert_eq!(x.to_string().parse::<Weight>().unwrap(), x);
    }

    #[test]
    fn graph_text_round_trip(seed in 0u64..500, n in 2usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected(n, 0.2, 9, &mut rng);
        let text = serialize_graph(&g);
        let back = parse_graph_file(&text).unwrap();
        prop_assert_eq!(serialize_graph(&back), text);
        prop_assert!(back.edges().eq(g.edges()));
    }

    #[test]
    fn rational_weights_keep_exact_distances(a in 1i64..50, b in 1i64..50, c in 1i64..50) {
        let g = build_graph(3, vec![(0, 1, w(a, 7)), (1, 2, w(b, 11)), (0, 2, w(c, 13))]).unwrap();
        let d = dijkstra(&g, 0).0;
        prop_assert_eq!(d[2].clone(), (w(a, 7) + w(b, 11)).min(w(c, 13)));
    }
}

#[test]
fn integer_shorthand_matches_explicit_build() {
    let a = graph_from_ints(3, &[(0, 1, 1), (1, 2, 2)]).unwrap();
    let b = build_graph(3, vec![(0, 1, Weight::integer(1)), (1, 2, Weight::integer(2))]).unwrap();
    assert_eq!(a, b);
}
