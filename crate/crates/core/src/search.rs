//! Shortest-path kernels: Dijkstra, A*, scan sets, max-hop paths,
//! second-shortest simple paths and Euler tours of shortest-path trees.
//!
//! The kernels in [`kernel`] run on a [`ScaledGraph`] in either integer
//! lane; the free functions at module level pick a lane and convert back
//! to exact [`Weight`]s.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use num_rational::BigRational;

use crate::graph::{Graph, ScaledGraph};
use crate::heuristics::{HeuristicError, HeuristicSpec};
use crate::numeric::{Length, Quantity, RadicalSum, Scale, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathResult {
    pub length: Weight,
    pub vertices: Vec<usize>,
    pub hops: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortestPathTree {
    pub root: usize,
    /// The root is its own parent.
    pub parent: Vec<usize>,
    pub dist: Vec<Weight>,
    pub euler_pos: Vec<(usize, usize)>,
}

impl ShortestPathTree {
    /// Strict ancestry by interval containment.
    pub fn is_ancestor(&self, u: usize, v: usize) -> bool {
        let (a, b) = self.euler_pos[u];
        let (c, d) = self.euler_pos[v];
        a < c && d < b
    }

    pub fn path_to(&self, v: usize) -> Vec<usize> {
        chain(&self.parent, self.root, v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TiePolicy {
    /// Earliest insertion first.
    Fifo,
    /// Latest insertion first.
    Lifo,
    /// Smaller heuristic value (larger `d`) first, then FIFO.
    MinH,
    /// Larger `d` first, then the target, then LIFO.
    MaxDist,
}

impl TiePolicy {
    pub const ALL: [TiePolicy; 4] = [
        TiePolicy::Fifo,
        TiePolicy::Lifo,
        TiePolicy::MinH,
        TiePolicy::MaxDist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TiePolicy::Fifo => "fifo",
            TiePolicy::Lifo => "lifo",
            TiePolicy::MinH => "min-h",
            TiePolicy::MaxDist => "max-dist",
        }
    }
}

impl std::str::FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TiePolicy::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase().replace('_', "-"))
            .ok_or_else(|| format!("unknown tie policy `{s}` (fifo, lifo, min-h, max-dist)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTrace {
    /// Pop order; starts with `s` and ends with `t`.
    pub scanned: Vec<usize>,
    pub dist: Weight,
    pub settled_dist: Vec<Weight>,
    /// `d(u) + h(u, t)` at the time `u` was popped.
    pub keys: Vec<Quantity>,
    pub pops: usize,
}

impl SearchTrace {
    /// Plain-text record: one `pop vertex d key` line per scanned vertex.
    pub fn to_record(&self) -> String {
        let mut out = format!("# astar trace v1\ndist {}\npops {}\n", self.dist, self.pops);
        for (i, v) in self.scanned.iter().enumerate() {
            let _ = writeln!(out, "{i} {v} {} {}", self.settled_dist[i], self.keys[i]);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanSets {
    pub must: Vec<usize>,
    pub may: Vec<usize>,
    pub optimal: Vec<usize>,
}

/// Per-target heuristic values on a lane, ready for key comparisons.
#[derive(Clone, Debug)]
pub enum Estimator<L> {
    Zero,
    Table(Vec<L>),
    /// `h(u) = radicands[u]^(1/p)`, all on the lane's scale. Comparisons
    /// whose enclosure stays within `gap` are declared ties.
    Radical {
        radicands: Vec<BigRational>,
        p: u32,
        gap: BigRational,
    },
}

impl<L: Length> Estimator<L> {
    /// Sign of `(du + h(u)) - (dv + h(v))`.
    pub fn cmp_keys(&self, du: &L, u: usize, dv: &L, v: usize) -> Ordering {
        match self {
            Estimator::Zero => du.cmp(dv),
            Estimator::Table(h) => du.add_ref(&h[u]).cmp(&dv.add_ref(&h[v])),
            Estimator::Radical { radicands, p, gap } => {
                let mut e = RadicalSum::new(*p);
                e.add_rational(&BigRational::from_integer(du.to_bigint() - dv.to_bigint()));
                e.add_root(BigRational::from_integer(1.into()), &radicands[u]);
                e.add_root(BigRational::from_integer((-1).into()), &radicands[v]);
                e.sign(gap)
            }
        }
    }

    /// Sign of `du + h(u) - bound`.
    pub fn cmp_bound(&self, du: &L, u: usize, bound: &L) -> Ordering {
        match self {
            Estimator::Zero => du.cmp(bound),
            Estimator::Table(h) => du.add_ref(&h[u]).cmp(bound),
            Estimator::Radical { radicands, p, gap } => {
                let mut e = RadicalSum::new(*p);
                e.add_rational(&BigRational::from_integer(du.to_bigint() - bound.to_bigint()));
                e.add_root(BigRational::from_integer(1.into()), &radicands[u]);
                e.sign(gap)
            }
        }
    }

    pub fn key(&self, du: &L, u: usize, scale: &Scale) -> Quantity {
        match self {
            Estimator::Zero => Quantity::Rational(scale.lower(du)),
            Estimator::Table(h) => Quantity::Rational(scale.lower(&du.add_ref(&h[u]))),
            Estimator::Radical { radicands, p, .. } => {
                let d = BigRational::from_integer(scale.denom().clone());
                Quantity::Radical {
                    offset: scale.lower(du),
                    radicand: Weight::from_rational(&radicands[u] / num_traits::Pow::pow(&d, *p)),
                    p: *p,
                }
            }
        }
    }
}

fn chain(parent: &[usize], root: usize, v: usize) -> Vec<usize> {
    let mut path = vec![v];
    let mut x = v;
    while x != root {
        x = parent[x];
        path.push(x);
    }
    path.reverse();
    path
}

/// Lane-generic kernels.
pub mod kernel {
    use super::*;

    /// Single-source distances.
    pub fn sssp<L: Length>(g: &ScaledGraph<L>, s: usize) -> Vec<L> {
        let n = g.n();
        let mut dist: Vec<Option<L>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[s] = Some(L::zero());
        heap.push(Reverse((L::zero(), s)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for (v, w) in &g.adj[u] {
                if done[*v] {
                    continue;
                }
                let nd = d.add_ref(w);
                if dist[*v].as_ref().is_none_or(|old| nd < *old) {
                    dist[*v] = Some(nd.clone());
                    heap.push(Reverse((nd, *v)));
                }
            }
        }
        dist.into_iter()
            .map(|d| d.expect("graph is connected"))
            .collect()
    }

    /// Distances plus parents; among tight predecessors the smallest index wins.
    pub fn sssp_tree<L: Length>(g: &ScaledGraph<L>, s: usize) -> (Vec<L>, Vec<usize>) {
        let dist = sssp(g, s);
        let parent = (0..g.n())
            .map(|v| {
                if v == s {
                    return s;
                }
                g.adj[v]
                    .iter()
                    .find(|(u, w)| dist[*u].add_ref(w) == dist[v])
                    .map(|(u, _)| *u)
                    .expect("some predecessor is tight")
            })
            .collect();
        (dist, parent)
    }

    /// Distances, maximal hop counts over shortest paths, and parents
    /// realizing both (smallest index among the candidates).
    pub fn max_hop_tree<L: Length>(
        g: &ScaledGraph<L>,
        s: usize,
    ) -> (Vec<L>, Vec<usize>, Vec<usize>) {
        let dist = sssp(g, s);
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by(|a, b| dist[*a].cmp(&dist[*b]));
        let mut hops = vec![0usize; g.n()];
        let mut parent = vec![s; g.n()];
        // Positive weights: every tight predecessor comes earlier in `order`.
        for &v in &order {
            if v == s {
                continue;
            }
            let mut best: Option<(usize, usize)> = None;
            for (u, w) in &g.adj[v] {
                if dist[*u].add_ref(w) == dist[v] {
                    let h = hops[*u] + 1;
                    if best.is_none_or(|(bh, _)| h > bh) {
                        best = Some((h, *u));
                    }
                }
            }
            let (h, u) = best.expect("some predecessor is tight");
            hops[v] = h;
            parent[v] = u;
        }
        (dist, hops, parent)
    }

    /// Shortest `s`–`t` distance avoiding `banned` vertices and one edge.
    pub fn sssp_avoiding<L: Length>(
        g: &ScaledGraph<L>,
        s: usize,
        t: usize,
        banned: &[bool],
        banned_edge: (usize, usize),
    ) -> Option<L> {
        let n = g.n();
        let mut dist: Vec<Option<L>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[s] = Some(L::zero());
        heap.push(Reverse((L::zero(), s)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            if u == t {
                return Some(d);
            }
            done[u] = true;
            for (v, w) in &g.adj[u] {
                if done[*v] || banned[*v] || (u, *v) == banned_edge || (*v, u) == banned_edge {
                    continue;
                }
                let nd = d.add_ref(w);
                if dist[*v].as_ref().is_none_or(|old| nd < *old) {
                    dist[*v] = Some(nd.clone());
                    heap.push(Reverse((nd, *v)));
                }
            }
        }
        None
    }

    /// Second-smallest length over all simple `s`–`t` paths, counted with
    /// multiplicity: equals `dist(s, t)` when two shortest paths exist.
    pub fn second_shortest<L: Length>(
        g: &ScaledGraph<L>,
        s: usize,
        t: usize,
        tree: &(Vec<L>, Vec<usize>),
    ) -> Option<L> {
        let (dist, parent) = tree;
        let path = chain(parent, s, t);
        let mut banned = vec![false; g.n()];
        let mut best: Option<L> = None;
        for i in 0..path.len() - 1 {
            let spur = path[i];
            let edge = (spur, path[i + 1]);
            if let Some(rest) = sssp_avoiding(g, spur, t, &banned, edge) {
                let cand = dist[spur].add_ref(&rest);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
            banned[spur] = true;
        }
        best
    }

    struct Entry<L> {
        d: L,
        v: usize,
        seq: usize,
    }

    /// Binary heap ordered by a caller-supplied comparator (`Less` pops first).
    struct KeyHeap<T> {
        data: Vec<T>,
    }

    impl<T> KeyHeap<T> {
        fn push(&mut self, x: T, before: &impl Fn(&T, &T) -> Ordering) {
            self.data.push(x);
            let mut i = self.data.len() - 1;
            while i > 0 {
                let p = (i - 1) / 2;
                if before(&self.data[i], &self.data[p]) == Ordering::Less {
                    self.data.swap(i, p);
                    i = p;
                } else {
                    break;
                }
            }
        }

        fn pop(&mut self, before: &impl Fn(&T, &T) -> Ordering) -> Option<T> {
            if self.data.is_empty() {
                return None;
            }
            let last = self.data.len() - 1;
            self.data.swap(0, last);
            let top = self.data.pop();
            let n = self.data.len();
            let mut i = 0;
            loop {
                let (l, r) = (2 * i + 1, 2 * i + 2);
                let mut m = i;
                if l < n && before(&self.data[l], &self.data[m]) == Ordering::Less {
                    m = l;
                }
                if r < n && before(&self.data[r], &self.data[m]) == Ordering::Less {
                    m = r;
                }
                if m == i {
                    break;
                }
                self.data.swap(i, m);
                i = m;
            }
            top
        }
    }

    /// A* popping `argmin d(u) + h(u)` among unsettled vertices until `t`
    /// is settled. Returns the pop order with settled distances.
    pub fn astar<L: Length>(
        g: &ScaledGraph<L>,
        s: usize,
        t: usize,
        est: &Estimator<L>,
        tie: TiePolicy,
    ) -> Vec<(usize, L)> {
        let n = g.n();
        let mut dist: Vec<Option<L>> = vec![None; n];
        let mut done = vec![false; n];
        let before = |a: &Entry<L>, b: &Entry<L>| {
            est.cmp_keys(&a.d, a.v, &b.d, b.v).then_with(|| match tie {
                TiePolicy::Fifo => a.seq.cmp(&b.seq),
                TiePolicy::Lifo => b.seq.cmp(&a.seq),
                TiePolicy::MinH => b.d.cmp(&a.d).then(a.seq.cmp(&b.seq)),
                TiePolicy::MaxDist => b
                    .d
                    .cmp(&a.d)
                    .then((b.v == t).cmp(&(a.v == t)))
                    .then(b.seq.cmp(&a.seq)),
            })
        };
        let mut heap = KeyHeap { data: Vec::new() };
        let mut seq = 0;
        dist[s] = Some(L::zero());
        heap.push(
            Entry {
                d: L::zero(),
                v: s,
                seq,
            },
            &before,
        );
        let mut popped = Vec::new();
        while let Some(Entry { d, v: u, .. }) = heap.pop(&before) {
            if done[u] || dist[u].as_ref() != Some(&d) {
                continue;
            }
            done[u] = true;
            popped.push((u, d.clone()));
            if u == t {
                break;
            }
            for (v, w) in &g.adj[u] {
                if done[*v] {
                    continue;
                }
                let nd = d.add_ref(w);
                if dist[*v].as_ref().is_none_or(|old| nd < *old) {
                    dist[*v] = Some(nd.clone());
                    seq += 1;
                    heap.push(Entry { d: nd, v: *v, seq }, &before);
                }
            }
        }
        popped
    }

    /// Fact-1 scan sets from the distances out of `s`.
    pub fn scan_sets<L: Length>(
        dist_s: &[L],
        t: usize,
        est: &Estimator<L>,
    ) -> (Vec<usize>, Vec<usize>) {
        let bound = &dist_s[t];
        let mut must = Vec::new();
        let mut may = Vec::new();
        for (u, du) in dist_s.iter().enumerate() {
            match est.cmp_bound(du, u, bound) {
                Ordering::Less => {
                    must.push(u);
                    may.push(u);
                }
                Ordering::Equal => may.push(u),
                Ordering::Greater => {}
            }
        }
        (must, may)
    }
}

/// Runs `$body` with `$L` bound to `i128` when `$small` holds, else `BigInt`.
#[macro_export]
macro_rules! with_lane {
    ($small:expr, $L:ident => $body:expr) => {
        if $small {
            type $L = i128;
            $body
        } else {
            type $L = ::num_bigint::BigInt;
            $body
        }
    };
}

fn graph_lane(g: &Graph) -> (Scale, bool) {
    let scale = g.scale();
    let small = g.fits_small_lane(&scale);
    (scale, small)
}

pub fn dijkstra(g: &Graph, s: usize) -> (Vec<Weight>, ShortestPathTree) {
    let (scale, small) = graph_lane(g);
    let (dist, parent) = with_lane!(small, L => {
        let (d, p) = kernel::sssp_tree::<L>(&g.scaled(&scale), s);
        (d.iter().map(|x| scale.lower(x)).collect::<Vec<_>>(), p)
    });
    let euler_pos = euler_tour_of(&parent, s);
    let tree = ShortestPathTree {
        root: s,
        parent,
        dist: dist.clone(),
        euler_pos,
    };
    (dist, tree)
}

pub fn max_hop_shortest_path(g: &Graph, s: usize, t: usize) -> PathResult {
    let (scale, small) = graph_lane(g);
    with_lane!(small, L => {
        let (dist, hops, parent) = kernel::max_hop_tree::<L>(&g.scaled(&scale), s);
        PathResult {
            length: scale.lower(&dist[t]),
            vertices: chain(&parent, s, t),
            hops: hops[t],
        }
    })
}

pub fn second_shortest_simple_path(g: &Graph, s: usize, t: usize) -> Option<Weight> {
    assert_ne!(s, t, "second shortest path needs distinct endpoints");
    let (scale, small) = graph_lane(g);
    with_lane!(small, L => {
        let sg = g.scaled::<L>(&scale);
        let tree = kernel::sssp_tree(&sg, s);
        kernel::second_shortest(&sg, s, t, &tree).map(|x| scale.lower(&x))
    })
}

pub fn astar(
    g: &Graph,
    s: usize,
    t: usize,
    h: &HeuristicSpec,
    tie: TiePolicy,
) -> Result<SearchTrace, HeuristicError> {
    let lane = h.lane(g)?;
    with_lane!(lane.small, L => {
        let sg = g.scaled::<L>(&lane.scale);
        let prepared = h.prepare::<L>(g, &lane.scale)?;
        let est = prepared.for_target(t);
        let popped = kernel::astar(&sg, s, t, &est, tie);
        let (last, dt) = popped.last().expect("t is reachable");
        debug_assert_eq!(*last, t);
        Ok(SearchTrace {
            dist: lane.scale.lower(dt),
            scanned: popped.iter().map(|(v, _)| *v).collect(),
            settled_dist: popped.iter().map(|(_, d)| lane.scale.lower(d)).collect(),
            keys: popped.iter().map(|(v, d)| est.key(d, *v, &lane.scale)).collect(),
            pops: popped.len(),
        })
    })
}

pub fn scan_sets(
    g: &Graph,
    s: usize,
    t: usize,
    h: &HeuristicSpec,
) -> Result<ScanSets, HeuristicError> {
    let lane = h.lane(g)?;
    with_lane!(lane.small, L => {
        let sg = g.scaled::<L>(&lane.scale);
        let prepared = h.prepare::<L>(g, &lane.scale)?;
        let est = prepared.for_target(t);
        let (_, _, parent) = kernel::max_hop_tree(&sg, s);
        let dist_s = kernel::sssp(&sg, s);
        let (must, may) = kernel::scan_sets(&dist_s, t, &est);
        Ok(ScanSets {
            optimal: optimal_set(&must, &chain(&parent, s, t)),
            must,
            may,
        })
    })
}

/// `must ∪ path`, sorted.
pub fn optimal_set(must: &[usize], path: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = must.iter().chain(path).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Depth-first Euler tour positions `1..=2n`, children in increasing index.
pub fn euler_tour(spt: &ShortestPathTree) -> Vec<(usize, usize)> {
    euler_tour_of(&spt.parent, spt.root)
}

pub fn euler_tour_of(parent: &[usize], root: usize) -> Vec<(usize, usize)> {
    let n = parent.len();
    let mut children = vec![Vec::new(); n];
    for v in 0..n {
        if v != root {
            children[parent[v]].push(v);
        }
    }
    let mut pos = vec![(0, 0); n];
    let mut clock = 0;
    let mut stack = vec![(root, 0usize)];
    while let Some((v, next)) = stack.pop() {
        if next == 0 {
            clock += 1;
            pos[v].0 = clock;
        }
        if let Some(&c) = children[v].get(next) {
            stack.push((v, next + 1));
            stack.push((c, 0));
        } else {
            clock += 1;
            pos[v].1 = clock;
        }
    }
    pos
}

/// Checks that `pos` is the Euler labeling of some rooted spanning tree:
/// 2n distinct positions in `1..=2n`, open before close, properly nested.
pub fn is_valid_euler_labeling(pos: &[(usize, usize)]) -> bool {
    let n = pos.len();
    let mut at = vec![None; 2 * n + 1];
    for (v, &(a, b)) in pos.iter().enumerate() {
        if a == 0 || b > 2 * n || a >= b || at[a].is_some() || at[b].is_some() {
            return false;
        }
        at[a] = Some((v, true));
        at[b] = Some((v, false));
    }
    let mut stack = Vec::new();
    for slot in at.iter().skip(1) {
        match slot {
            Some((v, true)) => stack.push(*v),
            Some((v, false)) => {
                if stack.pop() != Some(*v) {
                    return false;
                }
            }
            None => return false,
        }
        // A single root: the stack only empties at the very end.
        if stack.is_empty() && slot != &at[2 * n] {
            return false;
        }
    }
    stack.is_empty()
}

/// Converts a lane distance to an exact rational for callers holding a scale.
pub fn lower_all<L: Length>(scale: &Scale, xs: &[L]) -> Vec<Weight> {
    xs.iter().map(|x| scale.lower(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_from_ints;

    fn triangle() -> Graph {
        graph_from_ints(3, &[(0, 1, 1), (1, 2, 2), (0, 2, 7)]).unwrap()
    }

    fn star() -> Graph {
        graph_from_ints(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap()
    }

    #[test]
    fn dijkstra_examples() {
        let (d, tree) = dijkstra(&graph_from_ints(2, &[(0, 1, 1)]).unwrap(), 0);
        assert_eq!(d, vec![Weight::zero(), Weight::one()]);
        assert_eq!(tree.parent, vec![0, 0]);
        let (d, tree) = dijkstra(&triangle(), 0);
        assert_eq!(d[2], Weight::integer(3));
        assert_eq!(tree.path_to(2), vec![0, 1, 2]);
    }

    #[test]
    fn max_hop_prefers_more_edges() {
        let g = graph_from_ints(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 2)]).unwrap();
        let p = max_hop_shortest_path(&g, 0, 2);
        assert_eq!((p.length, p.hops, p.vertices), (Weight::integer(2), 2, vec![0, 1, 2]));
        let p = max_hop_shortest_path(&g, 1, 1);
        assert_eq!((p.hops, p.vertices), (0, vec![1]));
        let sq = graph_from_ints(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
        let p = max_hop_shortest_path(&sq, 0, 2);
        assert_eq!((p.length, p.hops), (Weight::integer(2), 2));
    }

    #[test]
    fn second_shortest_examples() {
        assert_eq!(
            second_shortest_simple_path(&graph_from_ints(2, &[(0, 1, 1)]).unwrap(), 0, 1),
            None
        );
        assert_eq!(
            second_shortest_simple_path(&triangle(), 0, 2),
            Some(Weight::integer(7))
        );
        let sq = graph_from_ints(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 2)]).unwrap();
        assert_eq!(
            second_shortest_simple_path(&sq, 0, 3),
            Some(Weight::integer(3))
        );
        // Two tied shortest paths: the second one has the same length.
        let sq = graph_from_ints(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
        assert_eq!(
            second_shortest_simple_path(&sq, 0, 2),
            Some(Weight::integer(2))
        );
    }

    #[test]
    fn star_pops_depend_on_tie_policy() {
        let g = star();
        let h = HeuristicSpec::Zero;
        let t = astar(&g, 1, 2, &h, TiePolicy::MaxDist).unwrap();
        assert_eq!(t.scanned, vec![1, 0, 2]);
        assert_eq!(t.dist, Weight::integer(2));
        let t = astar(&g, 1, 2, &h, TiePolicy::Fifo).unwrap();
        assert_eq!(t.scanned, vec![1, 0, 2]);
        let t = astar(&g, 1, 3, &h, TiePolicy::Fifo).unwrap();
        assert_eq!(t.scanned, vec![1, 0, 2, 3]);
        assert_eq!(t.pops, 4);
    }

    #[test]
    fn scan_sets_examples() {
        let path = graph_from_ints(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let s = scan_sets(&path, 0, 3, &HeuristicSpec::Zero).unwrap();
        assert_eq!(s.must, vec![0, 1, 2]);
        assert_eq!(s.may, vec![0, 1, 2, 3]);
        assert_eq!(s.optimal, vec![0, 1, 2, 3]);
        let s = scan_sets(&star(), 1, 2, &HeuristicSpec::Zero).unwrap();
        assert_eq!(s.must, vec![0, 1]);
        assert_eq!(s.may, vec![0, 1, 2, 3]);
        assert_eq!(s.optimal, vec![0, 1, 2]);
    }

    #[test]
    fn euler_tour_examples() {
        assert_eq!(euler_tour_of(&[0], 0), vec![(1, 2)]);
        // a=0, b=1, c=2, d=3, e=4; a -> b, e; b -> c, d
        let parent = [0, 0, 1, 1, 0];
        assert_eq!(
            euler_tour_of(&parent, 0),
            vec![(1, 10), (2, 7), (3, 4), (5, 6), (8, 9)]
        );
        assert_eq!(euler_tour_of(&[0, 0, 1], 0), vec![(1, 6), (2, 5), (3, 4)]);
        assert!(is_valid_euler_labeling(&euler_tour_of(&parent, 0)));
        assert!(!is_valid_euler_labeling(&[(1, 2), (3, 4)]));
        assert!(!is_valid_euler_labeling(&[(1, 3), (2, 4)]));
    }

    #[test]
    fn trace_record_lists_every_pop() {
        let t = astar(&triangle(), 0, 2, &HeuristicSpec::Zero, TiePolicy::Fifo).unwrap();
        let rec = t.to_record();
        assert_eq!(rec.lines().count(), 3 + t.pops);
        assert!(rec.contains("dist 3/1"));
    }
}
