//! Generators for the adversarial instance families and for random graphs
//! with unique shortest paths.
//!
//! Every generator returns an [`InstanceBundle`]: the graph, named vertex
//! families, named query families and the parameters needed to rebuild it.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{build_graph, parse_graph_file, serialize_graph, Graph, GraphError, ParseError};
use crate::grid::{grid_to_graph, parse_grid, serialize_grid, Cell, GridError, GridIndex, GridSpec};
use crate::numeric::Weight;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("random weights contain an approximated tie: {0}")]
    TieFound(String),
    #[error("no graph with the requested margin after {0} attempts")]
    MarginNotReached(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("bundle file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn param_err(msg: impl Into<String>) -> InstanceError {
    InstanceError::Param(msg.into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceBundle {
    pub kind: String,
    pub graph: Graph,
    pub grid: Option<(GridSpec, GridIndex)>,
    pub families: BTreeMap<String, Vec<usize>>,
    pub queries: BTreeMap<String, Vec<(usize, usize)>>,
    pub params: toml::Table,
}

impl InstanceBundle {
    pub fn family(&self, name: &str) -> &[usize] {
        self.families.get(name).map_or(&[], |v| v.as_slice())
    }

    pub fn query_family(&self, name: &str) -> &[(usize, usize)] {
        self.queries.get(name).map_or(&[], |v| v.as_slice())
    }

    pub fn param_int(&self, key: &str) -> Option<i64> {
        self.params.get(key).and_then(toml::Value::as_integer)
    }

    pub fn param_weight(&self, key: &str) -> Option<Weight> {
        self.params
            .get(key)
            .and_then(toml::Value::as_str)
            .and_then(|s| s.parse().ok())
    }

    pub fn vertex_of(&self, c: Cell) -> Option<usize> {
        self.grid
            .as_ref()
            .and_then(|(_, idx)| idx.vertex_of.get(&c).copied())
    }
}

fn weight_value(w: &Weight) -> toml::Value {
    toml::Value::String(w.to_string())
}

fn ints_value<T: Copy + Into<i64>>(xs: &[T]) -> toml::Value {
    toml::Value::Array(xs.iter().map(|&x| toml::Value::Integer(x.into())).collect())
}

fn big_value(x: &BigInt) -> toml::Value {
    toml::Value::String(x.to_string())
}

fn labelled(graph: Graph, labels: Vec<String>) -> Graph {
    graph.with_labels(labels.into_iter().map(Some).collect())
}

/// Vertex indices of the star-and-bits instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LpLayout {
    pub n: usize,
    pub bits: usize,
}

impl LpLayout {
    pub fn c(&self, j: usize) -> usize {
        j
    }
    pub fn a(&self, i: usize) -> usize {
        self.n + 1 + 2 * (i - 1)
    }
    pub fn abar(&self, i: usize) -> usize {
        self.n + 2 + 2 * (i - 1)
    }
    fn block(&self, i: usize) -> usize {
        self.n + 1 + 2 * self.bits + (i - 1) * (1 + 2 * self.n)
    }
    /// `a_{i,j}` for `j` in `0..=n`; `j = 0` is the hub.
    pub fn aux(&self, i: usize, j: usize) -> usize {
        self.block(i) + j
    }
    pub fn connector(&self, i: usize, j: usize) -> usize {
        self.block(i) + self.n + j
    }
    pub fn abar_leaf(&self, i: usize, j: usize) -> usize {
        self.n + 1 + 2 * self.bits + self.bits * (1 + 2 * self.n) + (i - 1) * self.n + (j - 1)
    }
    pub fn size(&self) -> usize {
        self.n + 1 + 2 * self.bits + self.bits * (1 + 3 * self.n)
    }
    /// Whether `c_j` attaches to `a_i` (else to `ā_i`).
    pub fn bit(&self, i: usize, j: usize) -> bool {
        ((j - 1) >> (i - 1)) & 1 == 1
    }
}

/// Star with `n` leaves wired to `log n` complementary pairs, plus the
/// auxiliary hubs, leaves and connectors. All weights are 1.
pub fn gen_lp_lb(n: usize) -> Result<InstanceBundle, InstanceError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(param_err(format!("n = {n} must be a power of two >= 2")));
    }
    let lay = LpLayout {
        n,
        bits: n.trailing_zeros() as usize,
    };
    let one = Weight::one();
    let mut edges = Vec::new();
    let mut e = |u: usize, v: usize| edges.push((u, v, one.clone()));
    for j in 1..=n {
        e(lay.c(0), lay.c(j));
        for i in 1..=lay.bits {
            e(lay.c(j), if lay.bit(i, j) { lay.a(i) } else { lay.abar(i) });
        }
    }
    for i in 1..=lay.bits {
        for j in 1..=n {
            e(lay.aux(i, 0), lay.aux(i, j));
            e(lay.connector(i, j), lay.aux(i, 0));
            e(lay.connector(i, j), lay.a(i));
            e(lay.abar(i), lay.abar_leaf(i, j));
        }
    }
    let size = lay.size();
    let mut labels = vec![String::new(); size];
    for j in 0..=n {
        labels[lay.c(j)] = format!("c{j}");
    }
    let mut families = BTreeMap::new();
    families.insert("star-center".into(), vec![lay.c(0)]);
    families.insert("star-leaves".into(), (1..=n).map(|j| lay.c(j)).collect());
    let mut queries = BTreeMap::new();
    let mut all_queries = Vec::new();
    for i in 1..=lay.bits {
        labels[lay.a(i)] = format!("a{i}");
        labels[lay.abar(i)] = format!("abar{i}");
        labels[lay.aux(i, 0)] = format!("a{i},0");
        for j in 1..=n {
            labels[lay.aux(i, j)] = format!("a{i},{j}");
            labels[lay.connector(i, j)] = format!("b{i},{j}");
            labels[lay.abar_leaf(i, j)] = format!("abar{i},{j}");
        }
        families.insert(format!("pair/{i}"), vec![lay.a(i), lay.abar(i)]);
        families.insert(format!("aux-hub/{i}"), vec![lay.aux(i, 0)]);
        families.insert(format!("aux-leaves/{i}"), (1..=n).map(|j| lay.aux(i, j)).collect());
        families.insert(format!("connectors/{i}"), (1..=n).map(|j| lay.connector(i, j)).collect());
        families.insert(format!("abar-leaves/{i}"), (1..=n).map(|j| lay.abar_leaf(i, j)).collect());
        let q: Vec<(usize, usize)> = (1..=n)
            .flat_map(|j1| (1..=n).map(move |j2| (lay.aux(i, j1), lay.abar_leaf(i, j2))))
            .collect();
        all_queries.extend(q.iter().copied());
        queries.insert(format!("aux-to-abar/{i}"), q);
    }
    queries.insert("aux-to-abar".into(), all_queries);
    let graph = labelled(build_graph(size, edges)?, labels);
    let mut params = toml::Table::new();
    params.insert("n".into(), (n as i64).into());
    params.insert("bits".into(), (lay.bits as i64).into());
    params.insert("vertices".into(), (size as i64).into());
    Ok(InstanceBundle {
        kind: "lp-lb".into(),
        graph,
        grid: None,
        families,
        queries,
        params,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// `u_idx = 9^(idx-1) / 9^N`, tie-free at `ε = 9^(-N)`.
    Deterministic,
    /// `u` uniform on multiples of `2^-30`; must pass the tie check at `epsilon`.
    Random { seed: u64, epsilon: Weight },
}

impl WeightMode {
    fn name(&self) -> &'static str {
        match self {
            WeightMode::Deterministic => "deterministic",
            WeightMode::Random { .. } => "random",
        }
    }
}

/// `9^(-count)`.
pub fn base9_epsilon(count: usize) -> Weight {
    Weight::new(1, Pow::pow(BigInt::from(9), count))
}

/// Fractional offsets for `count` weights, and the certified `ε`.
fn offsets(count: usize, mode: &WeightMode) -> (Vec<Weight>, Weight) {
    match mode {
        WeightMode::Deterministic => {
            let denom = Pow::pow(BigInt::from(9), count);
            let u = (0..count)
                .map(|e| Weight::new(Pow::pow(BigInt::from(9), e), denom.clone()))
                .collect();
            (u, base9_epsilon(count))
        }
        WeightMode::Random { seed, epsilon } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let u = (0..count)
                .map(|_| Weight::new(rng.gen_range(0..=(1i64 << 30)), 1i64 << 30))
                .collect();
            (u, epsilon.clone())
        }
    }
}

fn certify(weights: &[Weight], epsilon: &Weight, mode: &WeightMode) -> Result<(), InstanceError> {
    if let WeightMode::Random { .. } = mode {
        match crate::analysis::detect_approximated_tie(weights, epsilon, 4) {
            Ok(None) => Ok(()),
            Ok(Some(cert)) => Err(InstanceError::TieFound(format!("{:?}", cert.coefficients))),
            Err(e) => Err(param_err(e.to_string())),
        }
    } else {
        Ok(())
    }
}

/// Vertex indices of the clique-with-leaves instances (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CliqueLayout {
    pub m: usize,
    pub k: usize,
}

impl CliqueLayout {
    pub fn a(&self, i: usize) -> usize {
        i
    }
    pub fn leaf(&self, i: usize, p: usize) -> usize {
        self.m + i * self.k + p
    }
    pub fn size(&self) -> usize {
        self.m + self.m * self.k
    }
    /// Clique pairs `i < j` in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m).flat_map(move |i| (i + 1..self.m).map(move |j| (i, j)))
    }
}

fn clique_bundle(
    kind: &str,
    lay: CliqueLayout,
    clique_weight: impl Fn(usize, usize) -> Weight,
    leaf_weight: Weight,
    mut params: toml::Table,
) -> Result<InstanceBundle, InstanceError> {
    let mut edges = Vec::new();
    for (i, j) in lay.pairs() {
        edges.push((lay.a(i), lay.a(j), clique_weight(i, j)));
    }
    let mut labels = vec![String::new(); lay.size()];
    for i in 0..lay.m {
        labels[lay.a(i)] = format!("a{}", i + 1);
        for p in 0..lay.k {
            edges.push((lay.a(i), lay.leaf(i, p), leaf_weight.clone()));
            labels[lay.leaf(i, p)] = format!("b{}^{}", i + 1, p + 1);
        }
    }
    let graph = labelled(build_graph(lay.size(), edges)?, labels);
    let mut families = BTreeMap::new();
    families.insert("clique".into(), (0..lay.m).collect());
    families.insert("leaves".into(), (lay.m..lay.size()).collect());
    for i in 0..lay.m {
        families.insert(
            format!("leaves/{}", i + 1),
            (0..lay.k).map(|p| lay.leaf(i, p)).collect(),
        );
    }
    let mut queries = BTreeMap::new();
    queries.insert(
        "clique-pairs".into(),
        lay.pairs().map(|(i, j)| (lay.a(i), lay.a(j))).collect(),
    );
    let cross: Vec<(usize, usize)> = (0..lay.m)
        .flat_map(|i| (0..lay.m).filter(move |j| *j != i).map(move |j| (i, j)))
        .flat_map(|(i, j)| {
            (0..lay.k).flat_map(move |p| (0..lay.k).map(move |q| (lay.leaf(i, p), lay.leaf(j, q))))
        })
        .collect();
    queries.insert("leaf-to-leaf".into(), cross);
    params.insert("m".into(), (lay.m as i64).into());
    params.insert("k".into(), (lay.k as i64).into());
    params.insert("vertices".into(), (lay.size() as i64).into());
    Ok(InstanceBundle {
        kind: kind.into(),
        graph,
        grid: None,
        families,
        queries,
        params,
    })
}

/// Clique `w_ij = 10 + u_ij` with `k` leaves per clique vertex at
/// `w_0 = ε / (16 |V|)`.
pub fn gen_linf_clique(m: usize, k: usize, mode: WeightMode) -> Result<InstanceBundle, InstanceError> {
    if m < 2 || k < 1 {
        return Err(param_err("need m >= 2 and k >= 1"));
    }
    let lay = CliqueLayout { m, k };
    let count = m * (m - 1) / 2;
    let (u, epsilon) = offsets(count, &mode);
    let ten = Weight::integer(10);
    let weights: Vec<Weight> = u.iter().map(|x| &ten + x).collect();
    certify(&weights, &epsilon, &mode)?;
    let w0 = &epsilon / &Weight::integer(16 * lay.size() as i64);
    let index: BTreeMap<(usize, usize), usize> =
        lay.pairs().enumerate().map(|(idx, p)| (p, idx)).collect();
    let mut params = toml::Table::new();
    params.insert("mode".into(), mode.name().into());
    if let WeightMode::Random { seed, .. } = &mode {
        params.insert("seed".into(), (*seed as i64).into());
    }
    params.insert("epsilon".into(), weight_value(&epsilon));
    params.insert("w0".into(), weight_value(&w0));
    params.insert("u".into(), toml::Value::Array(u.iter().map(weight_value).collect()));
    params.insert(
        "crucial-slack".into(),
        weight_value(&(&epsilon / &Weight::integer(2 * lay.size() as i64))),
    );
    clique_bundle("linf-clique", lay, |i, j| weights[index[&(i, j)]].clone(), w0, params)
}

/// Symmetric `m × m` matrix of uniform values in `0..2^b` (zero diagonal).
pub fn random_delta(m: usize, b: u32, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![vec![0u64; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let v = rng.gen_range(0..(1u64 << b));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// `m²` values uniform in `0..2^b`, the `x` input of [`gen_labeling_grid`].
pub fn random_x(m: usize, b: u32, seed: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m * m).map(|_| rng.gen_range(0..1i64 << b)).collect()
}

/// Clique `w_ij = 6 · (2^b + δ_ij) - 2` with `k` unit-weight leaves per vertex.
/// `m, k >= 10` unless `allow_small`.
pub fn gen_labeling_clique(
    m: usize,
    k: usize,
    b: u32,
    delta: &[Vec<u64>],
    allow_small: bool,
) -> Result<InstanceBundle, InstanceError> {
    if (m < 10 || k < 10) && !allow_small {
        return Err(param_err("m and k must be >= 10 (pass the small-scale override for desk tests)"));
    }
    if m < 2 || k < 1 || b < 1 || b > 62 {
        return Err(param_err("need m >= 2, k >= 1 and 1 <= b <= 62"));
    }
    if delta.len() != m || delta.iter().any(|r| r.len() != m) {
        return Err(param_err(format!("delta must be {m} x {m}")));
    }
    let lay = CliqueLayout { m, k };
    for (i, j) in lay.pairs() {
        if delta[i][j] != delta[j][i] {
            return Err(param_err(format!("delta is not symmetric at ({i}, {j})")));
        }
        if delta[i][j] >= 1u64 << b {
            return Err(param_err(format!("delta[{i}][{j}] = {} exceeds 2^b - 1", delta[i][j])));
        }
    }
    let base = BigInt::one() << b;
    let weight = |i: usize, j: usize| Weight::integer((&base + delta[i][j]) * 6 - 2);
    let mut params = toml::Table::new();
    params.insert("b".into(), (b as i64).into());
    params.insert(
        "delta".into(),
        toml::Value::Array(delta.iter().map(|r| ints_value(&r.iter().map(|&x| x as i64).collect::<Vec<_>>())).collect()),
    );
    params.insert("bad-threshold".into(), weight_value(&Weight::integer(3)));
    clique_bundle("labeling-clique", lay, weight, Weight::one(), params)
}

/// Cell layout shared by both grid instances: the `m × m` block `R`, the
/// `k`-wide flank to its right and the `k`-tall flank below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridLayout {
    pub m: usize,
    pub k: usize,
}

impl GridLayout {
    pub fn size(&self) -> usize {
        self.m * self.m + 2 * self.m * self.k
    }

    pub fn in_r(c: Cell) -> bool {
        c.0 >= 0 && c.1 >= 0
    }

    fn spec(&self, r_weight: impl Fn(i64, i64) -> Weight, flank: Weight) -> Result<GridSpec, GridError> {
        let (m, k) = (self.m as i64, self.k as i64);
        let mut cells = BTreeMap::new();
        let mut blocked = Vec::new();
        for x in -k..m {
            for y in -k..m {
                if x < 0 && y < 0 {
                    continue;
                }
                let w = if x >= 0 && y >= 0 {
                    r_weight(x, y)
                } else {
                    flank.clone()
                };
                cells.insert((x, y), w);
                // Rows of the right flank and columns of the lower flank
                // are walled off from each other.
                if x < 0 && y + 1 < m {
                    blocked.push(((x, y), (x, y + 1)));
                }
                if y < 0 && x + 1 < m {
                    blocked.push(((x, y), (x + 1, y)));
                }
            }
        }
        let side = (m + k) as usize;
        GridSpec::new(side, side, (m - 1, m - 1), cells, blocked)
    }

    /// Cells of the unique shortest route from `(i, -p)` to `(-q, j)`:
    /// up the column `x = i`, then right along the row `y = j`.
    pub fn route(&self, i: i64, p: i64, q: i64, j: i64) -> Vec<Cell> {
        let mut cells: Vec<Cell> = (-p..=j).map(|y| (i, y)).collect();
        cells.extend((-q..i).rev().map(|x| (x, j)));
        cells
    }
}

fn grid_bundle(
    kind: &str,
    lay: GridLayout,
    spec: GridSpec,
    mut params: toml::Table,
) -> Result<InstanceBundle, InstanceError> {
    let (graph, idx) = grid_to_graph(&spec)?;
    let (m, k) = (lay.m as i64, lay.k as i64);
    let v = |c: Cell| idx.vertex(c);
    let mut families = BTreeMap::new();
    families.insert(
        "R".into(),
        idx.cell_of.iter().filter(|c| GridLayout::in_r(**c)).map(|c| v(*c)).collect(),
    );
    families.insert("gateways-low".into(), (0..m).map(|i| v((i, 0))).collect());
    families.insert("gateways-right".into(), (0..m).map(|j| v((0, j))).collect());
    for i in 0..m {
        families.insert(format!("column/{i}"), (1..=k).map(|p| v((i, -p))).collect());
        families.insert(format!("row/{i}"), (1..=k).map(|q| v((-q, i))).collect());
    }
    let mut queries = BTreeMap::new();
    queries.insert(
        "gateway-pairs".into(),
        (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| (v((i, 0)), v((0, j)))).collect(),
    );
    let mut flank = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for p in 1..=k {
                for q in 1..=k {
                    flank.push((v((i, -p)), v((-q, j))));
                }
            }
        }
    }
    queries.insert("flank-to-flank".into(), flank);
    params.insert("m".into(), (lay.m as i64).into());
    params.insert("k".into(), (lay.k as i64).into());
    params.insert("vertices".into(), (lay.size() as i64).into());
    Ok(InstanceBundle {
        kind: kind.into(),
        graph,
        grid: Some((spec, idx)),
        families,
        queries,
        params,
    })
}

/// Grid with `R` weights `(n - x) · n^3 + u_{x,y}` and flank weights
/// `ε_w = ε / (8mk)`.
pub fn gen_linf_grid(m: usize, k: usize, mode: WeightMode) -> Result<InstanceBundle, InstanceError> {
    if m < 2 || k < 1 {
        return Err(param_err("need m >= 2 and k >= 1"));
    }
    let lay = GridLayout { m, k };
    let n = lay.size() as i64;
    let (u, epsilon) = offsets(m * m, &mode);
    let r = |x: i64, y: i64| {
        Weight::integer(BigInt::from(n - x) * Pow::pow(BigInt::from(n), 3u32)) + u[(x * m as i64 + y) as usize].clone()
    };
    let r_weights: Vec<Weight> = (0..m as i64)
        .flat_map(|x| (0..m as i64).map(move |y| (x, y)))
        .map(|(x, y)| r(x, y))
        .collect();
    certify(&r_weights, &epsilon, &mode)?;
    let eps_w = &epsilon / &Weight::integer(8 * (m * k) as i64);
    let spec = lay.spec(r, eps_w.clone())?;
    let mut params = toml::Table::new();
    params.insert("mode".into(), mode.name().into());
    if let WeightMode::Random { seed, .. } = &mode {
        params.insert("seed".into(), (*seed as i64).into());
    }
    params.insert("epsilon".into(), weight_value(&epsilon));
    params.insert("epsilon-w".into(), weight_value(&eps_w));
    params.insert("u".into(), toml::Value::Array(u.iter().map(weight_value).collect()));
    params.insert(
        "crucial-slack".into(),
        weight_value(&(&epsilon / &Weight::integer(2 * m as i64))),
    );
    grid_bundle("linf-grid", lay, spec, params)
}

/// `δ` with path sums `Δ(i, j) = x[i·m + j]` along the up-then-right route
/// from `(i, 0)` to `(0, j)`; `delta[i][j]` belongs to cell `(i, j)`.
pub fn delta_from_x(x: &[i64], m: usize, b: u32) -> Result<Vec<Vec<i64>>, InstanceError> {
    if x.len() != m * m {
        return Err(param_err(format!("x must have m^2 = {} entries", m * m)));
    }
    if let Some(v) = x.iter().find(|&&v| v < 0 || v >= 1i64 << b) {
        return Err(param_err(format!("x entry {v} outside [0, 2^b - 1]")));
    }
    let xi = |i: usize, j: usize| x[i * m + j];
    let mut d = vec![vec![0i64; m]; m];
    d[0][0] = xi(0, 0);
    for i in 1..m {
        d[i][0] = xi(i, 0) - xi(i - 1, 0);
    }
    for j in 1..m {
        d[0][j] = xi(0, j) - xi(0, j - 1);
    }
    for i in 1..m {
        for j in 1..m {
            d[i][j] = d[i - 1][j - 1] + (xi(i, j) + xi(i - 1, j - 1)) - (xi(i, j - 1) + xi(i - 1, j));
        }
    }
    Ok(d)
}

/// `Σ δ` along the route from `(i, 0)` up to `(i, j)` then right to `(0, j)`.
pub fn route_delta_sum(delta: &[Vec<i64>], i: usize, j: usize) -> i64 {
    let up: i64 = (0..=j).map(|y| delta[i][y]).sum();
    let right: i64 = (0..i).map(|x| delta[x][j]).sum();
    up + right
}

/// Grid with `R` weights `(n - x) · n^4 + δ_{x,y} · n - 2k` and unit flanks.
pub fn gen_labeling_grid(m: usize, k: usize, b: u32, x: &[i64]) -> Result<InstanceBundle, InstanceError> {
    if m < 2 || k < 1 {
        return Err(param_err("need m >= 2 and k >= 1"));
    }
    let lay = GridLayout { m, k };
    let n = lay.size() as i64;
    let delta = delta_from_x(x, m, b)?;
    if let Some(d) = delta.iter().flatten().find(|d| d.abs() > n * n) {
        return Err(param_err(format!("|delta| = {} exceeds n^2; lower b", d.abs())));
    }
    let n4 = Pow::pow(BigInt::from(n), 4u32);
    let r = |cx: i64, cy: i64| {
        Weight::integer(BigInt::from(n - cx) * &n4 + delta[cx as usize][cy as usize] * n - 2 * k as i64)
    };
    let spec = lay.spec(r, Weight::one())?;
    let mut params = toml::Table::new();
    params.insert("b".into(), (b as i64).into());
    params.insert("x".into(), ints_value(x));
    params.insert("delta".into(), toml::Value::Array(delta.iter().map(|r| ints_value(r)).collect()));
    params.insert("bad-threshold".into(), weight_value(&Weight::integer(2 * k as i64)));
    grid_bundle("labeling-grid", lay, spec, params)
}

/// Reads `Δ(i, j)` back from `dist(v_{i,-1}, v_{-1,j})` on a labeling grid.
pub fn recover_delta(bundle: &InstanceBundle, dist: &Weight, i: usize, j: usize) -> Option<BigInt> {
    let n = BigInt::from(bundle.param_int("vertices")?);
    let k = BigInt::from(bundle.param_int("k")?);
    if !dist.is_integer() {
        return None;
    }
    // Path length is the R-cell sum plus 1 (two unit endpoints, halved).
    let s: BigInt = dist.numer() - 1;
    let n4: BigInt = Pow::pow(&n, 4u32);
    let mut r = num_integer::Integer::mod_floor(&s, &n4);
    if &r * 2 > n4 {
        r -= &n4;
    }
    let num: BigInt = r + &k * 2 * BigInt::from(i + j + 1);
    (num.clone() % &n).is_zero().then(|| num / n)
}

/// Odometer over tuples `(c_0, .., c_{len-1})` with `c_i in 0..k`.
#[derive(Clone, Debug)]
pub struct Tuples {
    k: usize,
    cur: Option<Vec<usize>>,
}

impl Tuples {
    pub fn new(len: usize, k: usize) -> Tuples {
        Tuples {
            k,
            cur: (k > 0).then(|| vec![0; len]),
        }
    }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().expect("checked above");
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.k {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// Leaf `m`-tuples `(b_1^{i_1}, .., b_m^{i_m})` of a clique instance.
pub fn clique_tuples(lay: CliqueLayout) -> impl Iterator<Item = Vec<usize>> {
    Tuples::new(lay.m, lay.k).map(move |c| c.iter().enumerate().map(|(i, p)| lay.leaf(i, *p)).collect())
}

/// Flank `2m`-tuples `(v_{0,-p_0}, .., v_{m-1,-p_{m-1}}, v_{-q_0,0}, ..)`.
pub fn grid_tuples(bundle: &InstanceBundle) -> impl Iterator<Item = Vec<usize>> + '_ {
    let m = bundle.param_int("m").unwrap_or(0) as usize;
    let k = bundle.param_int("k").unwrap_or(0) as usize;
    Tuples::new(2 * m, k).map(move |c| {
        c.iter()
            .enumerate()
            .map(|(slot, p)| {
                let depth = -(*p as i64) - 1;
                let cell = if slot < m {
                    (slot as i64, depth)
                } else {
                    (depth, (slot - m) as i64)
                };
                bundle.vertex_of(cell).expect("flank cell exists")
            })
            .collect()
    })
}

/// Erdős–Rényi graph with weights `k / 2^bits`, `k` uniform in
/// `1..=2^bits · n`, retried until connected with unique shortest paths,
/// then scaled by one integer factor so that every second-shortest simple
/// path exceeds the shortest by more than `margin`.
pub fn gen_random_usp(
    n: usize,
    edge_probability: f64,
    weight_bits: Option<u32>,
    margin: &Weight,
    seed: u64,
) -> Result<InstanceBundle, InstanceError> {
    const ATTEMPTS: usize = 64;
    if n < 2 {
        return Err(param_err("need n >= 2"));
    }
    if !(edge_probability > 0.0 && edge_probability <= 1.0) {
        return Err(param_err("edge probability must be in (0, 1]"));
    }
    if margin.is_negative() {
        return Err(param_err("margin must be non-negative"));
    }
    let bits = weight_bits.unwrap_or(5 * (usize::BITS - (n - 1).leading_zeros()).max(1));
    if BigInt::one() << bits < Pow::pow(BigInt::from(n), 5u32) || bits > 64 {
        return Err(param_err(format!("2^{bits} must be >= n^5 and bits <= 64")));
    }
    let denom = BigInt::one() << bits;
    let top = (n as u128) << bits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tie_rejections = 0;
    for _ in 0..ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(edge_probability) {
                    let k = rng.gen_range(1..=top);
                    edges.push((u, v, Weight::new(BigInt::from(k), denom.clone())));
                }
            }
        }
        let Ok(graph) = build_graph(n, edges.clone()) else {
            continue;
        };
        let report = crate::analysis::verify_usp_margin(&graph, &Weight::zero());
        let Some(raw) = report.min_margin.clone() else {
            // No pair has a second path: a tree, unique trivially.
            return finish_usp(graph, n, edge_probability, bits, margin, seed, tie_rejections, BigInt::one());
        };
        if !raw.is_positive() {
            tie_rejections += 1;
            continue;
        }
        let factor = if raw > *margin {
            BigInt::one()
        } else {
            (margin / &raw).floor().numer() + 1
        };
        let scaled = edges
            .into_iter()
            .map(|(u, v, w)| (u, v, &w * &Weight::integer(factor.clone())))
            .collect();
        let graph = build_graph(n, scaled)?;
        return finish_usp(graph, n, edge_probability, bits, margin, seed, tie_rejections, factor);
    }
    Err(InstanceError::MarginNotReached(ATTEMPTS))
}

#[allow(clippy::too_many_arguments)]
fn finish_usp(
    graph: Graph,
    n: usize,
    p: f64,
    bits: u32,
    margin: &Weight,
    seed: u64,
    tie_rejections: usize,
    factor: BigInt,
) -> Result<InstanceBundle, InstanceError> {
    let report = crate::analysis::verify_usp_margin(&graph, margin);
    if !report.pass {
        return Err(InstanceError::MarginNotReached(tie_rejections + 1));
    }
    let mut params = toml::Table::new();
    params.insert("n".into(), (n as i64).into());
    params.insert("edge-probability".into(), p.into());
    params.insert("weight-bits".into(), (bits as i64).into());
    params.insert("margin".into(), weight_value(margin));
    params.insert("seed".into(), (seed as i64).into());
    params.insert("tie-rejections".into(), (tie_rejections as i64).into());
    params.insert("scale-factor".into(), big_value(&factor));
    if let Some(mm) = &report.min_margin {
        params.insert("realized-margin".into(), weight_value(mm));
    }
    let mut families = BTreeMap::new();
    families.insert("all".into(), (0..n).collect());
    let mut queries = BTreeMap::new();
    queries.insert(
        "all-pairs".into(),
        (0..n).flat_map(|s| (0..n).filter(move |t| *t != s).map(move |t| (s, t))).collect(),
    );
    Ok(InstanceBundle {
        kind: "usp".into(),
        graph,
        grid: None,
        families,
        queries,
        params,
    })
}

/// Default edge probability `3 ln n / n`, capped at 1.
pub fn default_edge_probability(n: usize) -> f64 {
    (3.0 * (n as f64).ln() / n as f64).clamp(f64::MIN_POSITIVE, 1.0)
}

/// Writes `graph.txt`, `manifest.toml`, `families.txt`, `queries.txt` and,
/// for grids, `grid.toml`.
pub fn write_bundle(bundle: &InstanceBundle, dir: &Path) -> Result<(), InstanceError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("graph.txt"), serialize_graph(&bundle.graph))?;
    let mut manifest = toml::Table::new();
    manifest.insert("kind".into(), bundle.kind.clone().into());
    manifest.insert("params".into(), toml::Value::Table(bundle.params.clone()));
    fs::write(
        dir.join("manifest.toml"),
        toml::to_string(&manifest).map_err(|e| InstanceError::Format(e.to_string()))?,
    )?;
    let mut fam = String::from("# family: vertices\n");
    for (name, vs) in &bundle.families {
        let list: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        fam.push_str(&format!("{name}: {}\n", list.join(" ")));
    }
    fs::write(dir.join("families.txt"), fam)?;
    let mut q = String::from("# family s t\n");
    for (name, pairs) in &bundle.queries {
        for (s, t) in pairs {
            q.push_str(&format!("{name} {s} {t}\n"));
        }
    }
    fs::write(dir.join("queries.txt"), q)?;
    let g = &bundle.graph;
    if (0..g.n()).any(|v| g.label(v).is_some()) {
        let mut text = String::from("# vertex label\n");
        for v in 0..g.n() {
            if let Some(l) = g.label(v) {
                text.push_str(&format!("{v} {l}\n"));
            }
        }
        fs::write(dir.join("labels.txt"), text)?;
    }
    if let Some((spec, _)) = &bundle.grid {
        fs::write(dir.join("grid.toml"), serialize_grid(spec))?;
    }
    Ok(())
}

pub fn read_bundle(dir: &Path) -> Result<InstanceBundle, InstanceError> {
    let bad = |m: String| InstanceError::Format(m);
    let graph = parse_graph_file(&fs::read_to_string(dir.join("graph.txt"))?)?;
    let manifest: toml::Table = toml::from_str(&fs::read_to_string(dir.join("manifest.toml"))?)
        .map_err(|e| bad(e.to_string()))?;
    let kind = manifest
        .get("kind")
        .and_then(toml::Value::as_str)
        .ok_or_else(|| bad("manifest lacks `kind`".into()))?
        .to_string();
    let params = manifest
        .get("params")
        .and_then(toml::Value::as_table)
        .cloned()
        .unwrap_or_default();
    let mut families = BTreeMap::new();
    for line in fs::read_to_string(dir.join("families.txt"))?.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, rest) = line.split_once(':').ok_or_else(|| bad(format!("bad family line `{line}`")))?;
        let vs = rest
            .split_whitespace()
            .map(|s| s.parse::<usize>().map_err(|_| bad(format!("bad vertex `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        families.insert(name.trim().to_string(), vs);
    }
    let mut queries: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
    for line in fs::read_to_string(dir.join("queries.txt"))?.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let [name, s, t] = f.as_slice() else {
            return Err(bad(format!("bad query line `{line}`")));
        };
        let p = |x: &str| x.parse::<usize>().map_err(|_| bad(format!("bad vertex `{x}`")));
        queries.entry(name.to_string()).or_default().push((p(s)?, p(t)?));
    }
    let grid_path = dir.join("grid.toml");
    let grid = if grid_path.exists() {
        let spec = parse_grid(&fs::read_to_string(grid_path)?)?;
        let (g2, idx) = grid_to_graph(&spec)?;
        if g2.edges().ne(graph.edges()) {
            return Err(bad("grid.toml does not match graph.txt".into()));
        }
        Some((spec, idx))
    } else {
        None
    };
    let labels_path = dir.join("labels.txt");
    let graph = if labels_path.exists() {
        let mut labels = vec![None; graph.n()];
        for line in fs::read_to_string(labels_path)?.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (v, label) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| bad(format!("bad label line `{line}`")))?;
            let v: usize = v.parse().map_err(|_| bad(format!("bad vertex `{v}`")))?;
            *labels
                .get_mut(v)
                .ok_or_else(|| bad(format!("label for vertex {v} out of range")))? = Some(label.trim().to_string());
        }
        graph.with_labels(labels)
    } else {
        graph
    };
    Ok(InstanceBundle {
        kind,
        graph,
        grid,
        families,
        queries,
        params,
    })
}

/// Whether every shortest path between each pair of a family lies on the
/// given vertex route, using one distance row per source.
pub fn shortest_path_vertices(dist_s: &[Weight], dist_t: &[Weight], total: &Weight) -> Vec<usize> {
    (0..dist_s.len())
        .filter(|&u| &(&dist_s[u] + &dist_t[u]) == total)
        .collect()
}

/// All-pairs exact distances, computed in parallel.
pub fn all_pairs(g: &Graph) -> Vec<Vec<Weight>> {
    (0..g.n())
        .into_par_iter()
        .map(|s| crate::search::dijkstra(g, s).0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::dijkstra;

    #[test]
    fn lp_lb_counts() {
        let b = gen_lp_lb(4).unwrap();
        assert_eq!(b.graph.n(), 35);
        let lay = LpLayout { n: 4, bits: 2 };
        for p in 1..=2 {
            let d = dijkstra(&b.graph, lay.a(p)).0;
            assert_eq!(d[lay.abar(p)], Weight::integer(4));
        }
        for j in 1..=4 {
            for i in 1..=2 {
                let to_a = b.graph.weight(lay.c(j), lay.a(i)).is_some();
                let to_abar = b.graph.weight(lay.c(j), lay.abar(i)).is_some();
                assert!(to_a ^ to_abar);
            }
        }
        assert!(gen_lp_lb(6).is_err());
        assert_eq!(b.graph.label(lay.connector(2, 3)), Some("b2,3"));
    }

    #[test]
    fn linf_clique_deterministic_weights() {
        let b = gen_linf_clique(3, 2, WeightMode::Deterministic).unwrap();
        assert_eq!(b.graph.n(), 3 + 6);
        assert_eq!(b.param_weight("epsilon").unwrap(), Weight::new(1, 729));
        assert_eq!(b.graph.weight(0, 1).unwrap(), &Weight::new(10 * 729 + 1, 729));
        assert_eq!(b.graph.weight(0, 2).unwrap(), &Weight::new(10 * 729 + 9, 729));
        assert_eq!(b.graph.weight(1, 2).unwrap(), &Weight::new(10 * 729 + 81, 729));
        assert_eq!(b.param_weight("w0").unwrap(), Weight::new(1, 729 * 16 * 9));
    }

    #[test]
    fn labeling_clique_weights() {
        let mut delta = vec![vec![0u64; 2]; 2];
        delta[0][1] = 3;
        delta[1][0] = 3;
        let b = gen_labeling_clique(2, 1, 2, &delta, true).unwrap();
        assert_eq!(b.graph.weight(0, 1), Some(&Weight::integer(40)));
        let d = dijkstra(&b.graph, 2).0;
        assert_eq!(d[3], Weight::integer(42));
        assert!(gen_labeling_clique(2, 1, 2, &delta, false).is_err());
        delta[0][1] = 4;
        delta[1][0] = 4;
        assert!(gen_labeling_clique(2, 1, 2, &delta, true).is_err());
    }

    #[test]
    fn delta_recurrence_reproduces_x() {
        assert_eq!(delta_from_x(&[0; 4], 2, 1).unwrap(), vec![vec![0, 0], vec![0, 0]]);
        let x = [1, 2, 3, 4];
        let d = delta_from_x(&x, 2, 3).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(route_delta_sum(&d, i, j), x[i * 2 + j]);
            }
        }
        assert!(delta_from_x(&[8, 0, 0, 0], 2, 3).is_err());
    }

    #[test]
    fn grid_size_and_flank_weights() {
        let b = gen_linf_grid(3, 2, WeightMode::Deterministic).unwrap();
        assert_eq!(b.graph.n(), 9 + 12);
        let (spec, _) = b.grid.as_ref().unwrap();
        let eps_w = b.param_weight("epsilon-w").unwrap();
        for (c, w) in &spec.cells {
            if !GridLayout::in_r(*c) {
                assert_eq!(w, &eps_w);
            }
        }
    }

    #[test]
    fn tuples_enumerate_all_choices() {
        let all: Vec<Vec<usize>> = Tuples::new(2, 3).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[8], vec![2, 2]);
        let lay = CliqueLayout { m: 2, k: 2 };
        assert_eq!(clique_tuples(lay).count(), 4);
    }

    #[test]
    fn usp_small_cases() {
        let b = gen_random_usp(2, 1.0, None, &Weight::integer(3), 1).unwrap();
        assert_eq!(b.graph.edge_count(), 1);
        let b = gen_random_usp(10, 0.8, None, &Weight::integer(3), 4).unwrap();
        assert!(crate::analysis::verify_usp_margin(&b.graph, &Weight::integer(3)).pass);
    }

    #[test]
    fn bundle_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for b in [
            gen_lp_lb(4).unwrap(),
            gen_labeling_grid(2, 1, 2, &[1, 2, 3, 0]).unwrap(),
        ] {
            write_bundle(&b, dir.path()).unwrap();
            let back = read_bundle(dir.path()).unwrap();
            assert_eq!(back.graph.edges().collect::<Vec<_>>(), b.graph.edges().collect::<Vec<_>>());
            assert_eq!(back.families, b.families);
            assert_eq!(back.queries, b.queries);
            assert_eq!(back.params, b.params);
            assert_eq!(back.grid.is_some(), b.grid.is_some());
            let _ = fs::remove_file(dir.path().join("grid.toml"));
        }
    }
}
