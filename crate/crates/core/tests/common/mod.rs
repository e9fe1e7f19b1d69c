#![allow(dead_code)]

use astarlab_core::numeric::Weight;
use astarlab_core::{build_graph, Graph};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random spanning tree plus extra edges with probability `p`; integer
/// weights in `1..=max_w` so that ties are common.
pub fn random_connected(n: usize, p: f64, max_w: i64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, Weight::integer(rng.gen_range(1..=max_w))));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !seen.contains(&(u, v)) && rng.gen_bool(p) {
                edges.push((u, v, Weight::integer(rng.gen_range(1..=max_w))));
            }
        }
    }
    build_graph(n, edges).expect("spanning tree keeps it connected")
}

/// Lengths and hop counts of every simple `s`-`t` path, by DFS.
pub fn simple_paths(g: &Graph, s: usize, t: usize) -> Vec<(Weight, usize)> {
    fn go(g: &Graph, u: usize, t: usize, on: &mut Vec<bool>, len: Weight, hops: usize, out: &mut Vec<(Weight, usize)>) {
        if u == t {
            out.push((len, hops));
            return;
        }
        for (v, w) in g.neighbors(u) {
            if !on[*v] {
                on[*v] = true;
                go(g, *v, t, on, &len + w, hops + 1, out);
                on[*v] = false;
            }
        }
    }
    let mut on = vec![false; g.n()];
    on[s] = true;
    let mut out = Vec::new();
    go(g, s, t, &mut on, Weight::zero(), 0, &mut out);
    out.sort();
    out
}

/// Graph with the same vertices and the given edge weights replaced.
pub fn with_weight(g: &Graph, u: usize, v: usize, w: Weight) -> Graph {
    let edges = g
        .edges()
        .map(|(a, b, x)| {
            if (a, b) == (u.min(v), u.max(v)) {
                (a, b, w.clone())
            } else {
                (a, b, x.clone())
            }
        })
        .collect();
    build_graph(g.n(), edges).unwrap()
}

/// Graph with one extra edge.
pub fn with_edge(g: &Graph, u: usize, v: usize, w: Weight) -> Graph {
    let mut edges: Vec<(usize, usize, Weight)> = g.edges().map(|(a, b, x)| (a, b, x.clone())).collect();
    edges.push((u, v, w));
    build_graph(g.n(), edges).unwrap()
}
