//! Heuristic families: norms over embeddings, beacon distances, the
//! Euler-tour tie-breaking beacon heuristic and table-driven labelings.
//!
//! [`evaluate`] is the reference implementation on exact rationals. Search
//! and analysis use [`HeuristicSpec::prepare`], which lifts the same values
//! onto an integer lane once and then builds per-target [`Estimator`]s.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, ScaledGraph};
use crate::numeric::{exact_root, small_lane_limit, Length, Quantity, Scale, Weight};
use crate::search::{dijkstra, euler_tour, kernel, Estimator};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeuristicError {
    #[error("embedding has {found} rows, graph has {expected} vertices")]
    VertexCount { expected: usize, found: usize },
    #[error("vertex {vertex} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("embedding has no Euler positions")]
    MissingPi1,
    #[error("beacon set is empty")]
    NoBeacons,
    #[error("beacon {0} is out of range or repeated")]
    BadBeacon(usize),
    #[error("cannot sample {size} beacons from {n} vertices")]
    SampleTooLarge { size: usize, n: usize },
    #[error("label value {value} exceeds cap {cap}")]
    ExceedsCap { value: BigInt, cap: BigInt },
    #[error("only beacon heuristics have a label-table view")]
    NotLabelable,
    #[error("norm exponent must be at least 1")]
    BadExponent,
    #[error("heuristic value is irrational: {0}")]
    Irrational(String),
    #[error("embedding file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Per-vertex coordinates `pi0` and, for the tie-breaking heuristic,
/// per-beacon Euler positions `pi1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub pi0: Vec<Vec<Weight>>,
    pub pi1: Option<Vec<Vec<(usize, usize)>>>,
    pub beacons: Option<Vec<usize>>,
}

impl Embedding {
    pub fn new(pi0: Vec<Vec<Weight>>) -> Embedding {
        Embedding {
            pi0,
            pi1: None,
            beacons: None,
        }
    }

    pub fn n(&self) -> usize {
        self.pi0.len()
    }

    pub fn dim(&self) -> usize {
        self.pi0.first().map_or(0, |r| r.len())
    }

    pub fn validate(&self, n: usize) -> Result<(), HeuristicError> {
        if self.n() != n {
            return Err(HeuristicError::VertexCount {
                expected: n,
                found: self.n(),
            });
        }
        let d = self.dim();
        for (v, row) in self.pi0.iter().enumerate() {
            if row.len() != d {
                return Err(HeuristicError::DimensionMismatch {
                    vertex: v,
                    expected: d,
                    found: row.len(),
                });
            }
        }
        if let Some(pi1) = &self.pi1 {
            for (v, row) in pi1.iter().enumerate() {
                if row.len() != d {
                    return Err(HeuristicError::DimensionMismatch {
                        vertex: v,
                        expected: d,
                        found: row.len(),
                    });
                }
            }
        }
        Ok(())
    }

    fn scale(&self) -> Scale {
        Scale::of(self.pi0.iter().flatten())
    }

    /// Largest coordinate spread, an upper bound on any ℓ∞ difference.
    fn max_spread(&self) -> Weight {
        (0..self.dim())
            .map(|i| {
                let col = self.pi0.iter().map(|r| &r[i]);
                let lo = col.clone().min().cloned().unwrap_or_else(Weight::zero);
                let hi = col.max().cloned().unwrap_or_else(Weight::zero);
                hi - lo
            })
            .fold(Weight::zero(), Weight::max)
    }

    /// Euler positions of one beacon column, for validity checks.
    pub fn euler_column(&self, i: usize) -> Option<Vec<(usize, usize)>> {
        self.pi1
            .as_ref()
            .map(|pi1| pi1.iter().map(|row| row[i]).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormP {
    Finite(u32),
    Infinity,
}

impl std::str::FromStr for NormP {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "infinity" => Ok(NormP::Infinity),
            _ => match s.parse::<u32>() {
                Ok(p) if p >= 1 => Ok(NormP::Finite(p)),
                _ => Err(format!("norm exponent `{s}` must be a positive integer or `inf`")),
            },
        }
    }
}

impl std::fmt::Display for NormP {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormP::Finite(p) => write!(f, "{p}"),
            NormP::Infinity => write!(f, "inf"),
        }
    }
}

/// How a [`LabelTable`] combines the labels of two vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Combiner {
    /// `unit · max_i |x_i - y_i|`.
    MaxAbsDiff,
    /// Labels are `d` values followed by `d` opens and `d` closes;
    /// `max_i(unit · |x_i - y_i| + penalty_i)`.
    TieBreak { d: usize },
    /// Explicit values keyed by label pairs; missing pairs map to `default`.
    Explicit {
        table: BTreeMap<(Vec<BigInt>, Vec<BigInt>), Weight>,
        default: Weight,
    },
}

/// Labeling heuristic `h(s, t) = g(f(s), f(t))` with integer labels in `0..=cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelTable {
    pub labels: Vec<Vec<BigInt>>,
    pub unit: Weight,
    pub cap: BigInt,
    pub combiner: Combiner,
}

impl LabelTable {
    pub fn new(
        labels: Vec<Vec<BigInt>>,
        unit: Weight,
        cap: BigInt,
        combiner: Combiner,
    ) -> Result<LabelTable, HeuristicError> {
        for value in labels.iter().flatten() {
            if value.is_negative() || *value > cap {
                return Err(HeuristicError::ExceedsCap {
                    value: value.clone(),
                    cap,
                });
            }
        }
        Ok(LabelTable {
            labels,
            unit,
            cap,
            combiner,
        })
    }

    pub fn label_length(&self) -> usize {
        self.labels.first().map_or(0, |l| l.len())
    }

    pub fn value(&self, s: usize, t: usize) -> Weight {
        let (x, y) = (&self.labels[s], &self.labels[t]);
        match &self.combiner {
            Combiner::MaxAbsDiff => {
                let m = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b).abs())
                    .max()
                    .unwrap_or_default();
                &self.unit * &Weight::integer(m)
            }
            Combiner::TieBreak { d } => {
                let d = *d;
                (0..d)
                    .map(|i| {
                        let pen = penalty(
                            (usize_of(&x[d + i]), usize_of(&x[2 * d + i])),
                            (usize_of(&y[d + i]), usize_of(&y[2 * d + i])),
                        );
                        &self.unit * &Weight::integer((&x[i] - &y[i]).abs())
                            + Weight::integer(pen)
                    })
                    .fold(Weight::zero(), Weight::max)
            }
            Combiner::Explicit { table, default } => table
                .get(&(x.clone(), y.clone()))
                .cloned()
                .unwrap_or_else(|| default.clone()),
        }
    }

    fn max_value(&self) -> Weight {
        match &self.combiner {
            Combiner::MaxAbsDiff => &self.unit * &Weight::integer(self.cap.clone()),
            Combiner::TieBreak { .. } => {
                &self.unit * &Weight::integer(self.cap.clone()) + Weight::integer(2)
            }
            Combiner::Explicit { table, default } => table
                .values()
                .map(Weight::abs)
                .fold(default.abs(), Weight::max),
        }
    }

    fn scale(&self) -> Scale {
        let mut s = Scale::of([&self.unit]);
        if let Combiner::Explicit { table, default } = &self.combiner {
            s.include(default);
            for w in table.values() {
                s.include(w);
            }
        }
        s
    }
}

fn usize_of(v: &BigInt) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

/// `|sign(open_s - open_t) + sign(close_s - close_t)|`: 0 when one interval
/// contains the other (or they coincide), 2 when they are disjoint.
pub fn penalty(s: (usize, usize), t: (usize, usize)) -> i64 {
    let sign = |a: usize, b: usize| (a as i64 - b as i64).signum();
    (sign(s.0, t.0) + sign(s.1, t.1)).abs()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeuristicSpec {
    Zero,
    /// `h(u, t) = dist(u, t)`.
    Exact,
    /// `‖π(u) - π(t)‖_p`. For finite `p ≥ 2` comparisons are certified
    /// by interval refinement; enclosures within `gap` count as ties.
    Norm {
        p: NormP,
        emb: Arc<Embedding>,
        gap: Weight,
    },
    Beacon(Arc<Embedding>),
    BeaconTieBreak(Arc<Embedding>),
    LabelTable(Arc<LabelTable>),
}

/// Integer lane chosen for a graph and heuristic pair.
#[derive(Clone, Debug)]
pub struct Lane {
    pub scale: Scale,
    pub small: bool,
}

impl HeuristicSpec {
    pub fn name(&self) -> &'static str {
        match self {
            HeuristicSpec::Zero => "zero",
            HeuristicSpec::Exact => "exact",
            HeuristicSpec::Norm { .. } => "norm",
            HeuristicSpec::Beacon(_) => "beacon",
            HeuristicSpec::BeaconTieBreak(_) => "beacon-tiebreak",
            HeuristicSpec::LabelTable(_) => "label-table",
        }
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        match self {
            HeuristicSpec::Norm { emb, .. }
            | HeuristicSpec::Beacon(emb)
            | HeuristicSpec::BeaconTieBreak(emb) => Some(emb),
            _ => None,
        }
    }

    fn validate(&self, g: &Graph) -> Result<(), HeuristicError> {
        match self {
            HeuristicSpec::Norm { p, emb, .. } => {
                if *p == NormP::Finite(0) {
                    return Err(HeuristicError::BadExponent);
                }
                emb.validate(g.n())
            }
            HeuristicSpec::Beacon(emb) => emb.validate(g.n()),
            HeuristicSpec::BeaconTieBreak(emb) => {
                emb.validate(g.n())?;
                emb.pi1.as_ref().map(|_| ()).ok_or(HeuristicError::MissingPi1)
            }
            HeuristicSpec::LabelTable(t) => {
                if t.labels.len() != g.n() {
                    return Err(HeuristicError::VertexCount {
                        expected: g.n(),
                        found: t.labels.len(),
                    });
                }
                Ok(())
            }
            HeuristicSpec::Zero | HeuristicSpec::Exact => Ok(()),
        }
    }

    /// Common scale for `g` and this heuristic, and whether every key
    /// `d + h` fits the `i128` lane.
    pub fn lane(&self, g: &Graph) -> Result<Lane, HeuristicError> {
        self.validate(g)?;
        let mut scale = g.scale();
        let h_bound = match self {
            HeuristicSpec::Zero => Weight::zero(),
            HeuristicSpec::Exact => g.total_weight(),
            HeuristicSpec::Norm { p, emb, gap } => {
                scale = scale.merge(&emb.scale()).merge(&Scale::of([gap]));
                match p {
                    NormP::Infinity => emb.max_spread(),
                    // ℓp ≤ ℓ1 ≤ d · max spread
                    NormP::Finite(_) => &emb.max_spread() * &Weight::integer(emb.dim() as i64),
                }
            }
            HeuristicSpec::Beacon(emb) => {
                scale = scale.merge(&emb.scale());
                emb.max_spread()
            }
            HeuristicSpec::BeaconTieBreak(emb) => {
                scale = scale.merge(&emb.scale());
                emb.max_spread() + Weight::integer(2)
            }
            HeuristicSpec::LabelTable(t) => {
                scale = scale.merge(&t.scale());
                t.max_value()
            }
        };
        let bound = g.total_weight() + h_bound + Weight::integer(2);
        let small = scale.lift_big(&bound) < small_lane_limit();
        Ok(Lane { scale, small })
    }

    /// Lifts the heuristic's data onto `scale` (as returned by [`Self::lane`]).
    pub fn prepare<L: Length>(
        &self,
        g: &Graph,
        scale: &Scale,
    ) -> Result<Prepared<L>, HeuristicError> {
        self.validate(g)?;
        let lift_rows = |emb: &Embedding| -> Vec<Vec<L>> {
            emb.pi0
                .iter()
                .map(|r| r.iter().map(|w| scale.lift(w)).collect())
                .collect()
        };
        Ok(match self {
            HeuristicSpec::Zero => Prepared::Zero,
            HeuristicSpec::Exact => Prepared::Exact(g.scaled(scale)),
            HeuristicSpec::Norm {
                p: NormP::Infinity,
                emb,
                ..
            }
            | HeuristicSpec::Beacon(emb) => Prepared::MaxDiff(lift_rows(emb)),
            HeuristicSpec::Norm {
                p: NormP::Finite(1),
                emb,
                ..
            } => Prepared::SumDiff(lift_rows(emb)),
            HeuristicSpec::Norm {
                p: NormP::Finite(p),
                emb,
                gap,
            } => Prepared::Power {
                coords: emb
                    .pi0
                    .iter()
                    .map(|r| r.iter().map(|w| scale.lift_big(w)).collect())
                    .collect(),
                p: *p,
                gap: BigRational::from_integer(scale.lift_big(gap)),
            },
            HeuristicSpec::BeaconTieBreak(emb) => Prepared::TieBreak {
                coords: lift_rows(emb),
                pos: emb.pi1.clone().ok_or(HeuristicError::MissingPi1)?,
                two: scale.lift(&Weight::integer(2)),
            },
            HeuristicSpec::LabelTable(t) => Prepared::Table {
                table: t.clone(),
                scale: scale.clone(),
            },
        })
    }

    /// `h(t, t) = 0` and `h ≤ dist` hold by construction for these families
    /// on any graph.
    pub fn is_consistent_by_construction(&self) -> bool {
        matches!(
            self,
            HeuristicSpec::Zero | HeuristicSpec::Exact | HeuristicSpec::Beacon(_)
        )
    }
}

/// A heuristic lifted onto an integer lane.
#[derive(Clone, Debug)]
pub enum Prepared<L> {
    Zero,
    Exact(ScaledGraph<L>),
    MaxDiff(Vec<Vec<L>>),
    SumDiff(Vec<Vec<L>>),
    Power {
        coords: Vec<Vec<BigInt>>,
        p: u32,
        gap: BigRational,
    },
    TieBreak {
        coords: Vec<Vec<L>>,
        pos: Vec<Vec<(usize, usize)>>,
        two: L,
    },
    Table {
        table: Arc<LabelTable>,
        scale: Scale,
    },
}

impl<L: Length> Prepared<L> {
    pub fn for_target(&self, t: usize) -> Estimator<L> {
        match self {
            Prepared::Zero => Estimator::Zero,
            Prepared::Exact(sg) => Estimator::Table(kernel::sssp(sg, t)),
            Prepared::MaxDiff(c) => Estimator::Table(
                c.iter()
                    .map(|r| {
                        r.iter()
                            .zip(&c[t])
                            .map(|(a, b)| a.abs_diff(b))
                            .max()
                            .unwrap_or_else(L::zero)
                    })
                    .collect(),
            ),
            Prepared::SumDiff(c) => Estimator::Table(
                c.iter()
                    .map(|r| {
                        r.iter()
                            .zip(&c[t])
                            .fold(L::zero(), |acc, (a, b)| acc + a.abs_diff(b))
                    })
                    .collect(),
            ),
            Prepared::Power { coords, p, gap } => Estimator::Radical {
                radicands: coords
                    .iter()
                    .map(|r| {
                        let s: BigInt = r
                            .iter()
                            .zip(&coords[t])
                            .map(|(a, b)| Pow::pow((a - b).abs(), *p))
                            .sum();
                        BigRational::from_integer(s)
                    })
                    .collect(),
                p: *p,
                gap: gap.clone(),
            },
            Prepared::TieBreak { coords, pos, two } => Estimator::Table(
                coords
                    .iter()
                    .zip(pos)
                    .map(|(r, pr)| {
                        r.iter()
                            .zip(&coords[t])
                            .zip(pr.iter().zip(&pos[t]))
                            .map(|((a, b), (ps, pt))| {
                                let d = a.abs_diff(b);
                                if penalty(*ps, *pt) == 0 {
                                    d
                                } else {
                                    d + two.clone()
                                }
                            })
                            .max()
                            .unwrap_or_else(L::zero)
                    })
                    .collect(),
            ),
            Prepared::Table { table, scale } => {
                Estimator::Table((0..table.labels.len()).map(|u| scale.lift(&table.value(u, t))).collect())
            }
        }
    }
}

/// Reference evaluation of `h(u, t)` on exact rationals.
pub fn evaluate(h: &HeuristicSpec, g: &Graph, u: usize, t: usize) -> Result<Quantity, HeuristicError> {
    h.validate(g)?;
    let diffs = |emb: &Embedding| -> Vec<Weight> {
        emb.pi0[u]
            .iter()
            .zip(&emb.pi0[t])
            .map(|(a, b)| (a - b).abs())
            .collect()
    };
    let exact = |w: Weight| Ok(Quantity::Rational(w));
    match h {
        HeuristicSpec::Zero => exact(Weight::zero()),
        HeuristicSpec::Exact => exact(dijkstra(g, t).0[u].clone()),
        HeuristicSpec::Norm { p, emb, .. } => match p {
            NormP::Infinity => exact(diffs(emb).into_iter().fold(Weight::zero(), Weight::max)),
            NormP::Finite(p) => {
                let sum: Weight = diffs(emb).iter().map(|d| d.pow(*p as i32)).sum();
                match exact_root(sum.as_rational(), *p) {
                    Some(r) => exact(Weight::from_rational(r)),
                    None => Ok(Quantity::Radical {
                        offset: Weight::zero(),
                        radicand: sum,
                        p: *p,
                    }),
                }
            }
        },
        HeuristicSpec::Beacon(emb) => exact(diffs(emb).into_iter().fold(Weight::zero(), Weight::max)),
        HeuristicSpec::BeaconTieBreak(emb) => exact(evaluate_tiebreak(emb, u, t)?),
        HeuristicSpec::LabelTable(table) => exact(table.value(u, t)),
    }
}

/// [`evaluate`] for families whose values are always rational.
pub fn evaluate_exact(
    h: &HeuristicSpec,
    g: &Graph,
    u: usize,
    t: usize,
) -> Result<Weight, HeuristicError> {
    match evaluate(h, g, u, t)? {
        Quantity::Rational(w) => Ok(w),
        q => Err(HeuristicError::Irrational(q.to_string())),
    }
}

fn check_beacons(n: usize, beacons: &[usize]) -> Result<(), HeuristicError> {
    if beacons.is_empty() {
        return Err(HeuristicError::NoBeacons);
    }
    let mut seen = vec![false; n];
    for &b in beacons {
        if b >= n || seen[b] {
            return Err(HeuristicError::BadBeacon(b));
        }
        seen[b] = true;
    }
    Ok(())
}

fn beacon_trees(g: &Graph, beacons: &[usize]) -> Vec<(Vec<Weight>, Vec<(usize, usize)>)> {
    beacons
        .par_iter()
        .map(|&b| {
            let (dist, tree) = dijkstra(g, b);
            (dist, euler_tour(&tree))
        })
        .collect()
}

/// `pi0[v][i] = dist(v, beacons[i])`.
pub fn build_beacon_embedding(g: &Graph, beacons: &[usize]) -> Result<Embedding, HeuristicError> {
    check_beacons(g.n(), beacons)?;
    let trees = beacon_trees(g, beacons);
    Ok(Embedding {
        pi0: (0..g.n())
            .map(|v| trees.iter().map(|(d, _)| d[v].clone()).collect())
            .collect(),
        pi1: None,
        beacons: Some(beacons.to_vec()),
    })
}

/// Beacon embedding plus Euler positions of every vertex in each beacon's
/// shortest-path tree.
pub fn build_tiebreak_embedding(
    g: &Graph,
    beacons: &[usize],
) -> Result<Embedding, HeuristicError> {
    check_beacons(g.n(), beacons)?;
    let trees = beacon_trees(g, beacons);
    Ok(Embedding {
        pi0: (0..g.n())
            .map(|v| trees.iter().map(|(d, _)| d[v].clone()).collect())
            .collect(),
        pi1: Some(
            (0..g.n())
                .map(|v| trees.iter().map(|(_, e)| e[v]).collect())
                .collect(),
        ),
        beacons: Some(beacons.to_vec()),
    })
}

/// `max_i(|π0_i(s) - π0_i(t)| + penalty_i(s, t))`.
pub fn evaluate_tiebreak(emb: &Embedding, s: usize, t: usize) -> Result<Weight, HeuristicError> {
    let pi1 = emb.pi1.as_ref().ok_or(HeuristicError::MissingPi1)?;
    Ok((0..emb.dim())
        .map(|i| {
            (&emb.pi0[s][i] - &emb.pi0[t][i]).abs()
                + Weight::integer(penalty(pi1[s][i], pi1[t][i]))
        })
        .fold(Weight::zero(), Weight::max))
}

/// Uniform sample of `size` distinct vertices, sorted; deterministic in `seed`.
pub fn sample_beacons(n: usize, size: usize, seed: u64) -> Result<Vec<usize>, HeuristicError> {
    if size > n {
        return Err(HeuristicError::SampleTooLarge { size, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = rand::seq::index::sample(&mut rng, n, size).into_vec();
    out.sort_unstable();
    Ok(out)
}

/// `n^alpha` rounded to the nearest integer, at least 1 and at most `n`.
pub fn beacon_count(n: usize, alpha: f64) -> usize {
    ((n as f64).powf(alpha).round() as usize).clamp(1, n.max(1))
}

/// Default label cap `2 · (n^4 + Σ scaled edge weights)`.
pub fn default_cap(g: &Graph, scale: &Scale) -> BigInt {
    let n = BigInt::from(g.n());
    (Pow::pow(&n, 4u32) + scale.lift_big(&g.total_weight())) * 2
}

/// Label-table view of a beacon heuristic: `f(v)` holds the scaled
/// distances (then opens and closes for the tie-breaking variant).
pub fn as_label_table(h: &HeuristicSpec, g: &Graph) -> Result<LabelTable, HeuristicError> {
    let (emb, combiner) = match h {
        HeuristicSpec::Beacon(emb) => (emb, Combiner::MaxAbsDiff),
        HeuristicSpec::BeaconTieBreak(emb) => (emb, Combiner::TieBreak { d: emb.dim() }),
        _ => return Err(HeuristicError::NotLabelable),
    };
    h.validate(g)?;
    let scale = emb.scale();
    let labels = (0..g.n())
        .map(|v| {
            let mut f: Vec<BigInt> = emb.pi0[v].iter().map(|w| scale.lift_big(w)).collect();
            if let Some(pi1) = &emb.pi1 {
                f.extend(pi1[v].iter().map(|p| BigInt::from(p.0)));
                f.extend(pi1[v].iter().map(|p| BigInt::from(p.1)));
            }
            f
        })
        .collect();
    let unit = Weight::new(1, scale.denom().clone());
    LabelTable::new(labels, unit, default_cap(g, &g.scale().merge(&scale)), combiner)
}

pub fn serialize_embedding(emb: &Embedding) -> String {
    let mut out = format!("{} {}", emb.n(), emb.dim());
    if emb.pi1.is_some() {
        out.push_str(" pi1");
    }
    out.push('\n');
    if let Some(b) = &emb.beacons {
        out.push_str("beacons");
        for v in b {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    for v in 0..emb.n() {
        let coords: Vec<String> = emb.pi0[v].iter().map(|w| w.to_string()).collect();
        out.push_str(&coords.join(" "));
        if let Some(pi1) = &emb.pi1 {
            for (a, b) in &pi1[v] {
                let _ = write!(out, " {a}:{b}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_embedding(text: &str) -> Result<Embedding, HeuristicError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();
    let err = |line: usize, msg: String| HeuristicError::Parse { line, msg };
    let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let count = |s: &str| s.parse::<usize>().map_err(|_| err(hl, format!("bad count `{s}`")));
    let (n, d, has_pi1) = match h.as_slice() {
        [n, d] => (count(n)?, count(d)?, false),
        [n, d, "pi1"] => (count(n)?, count(d)?, true),
        _ => return Err(err(hl, "header must be `n d [pi1]`".into())),
    };
    let mut beacons = None;
    if let Some((bl, l)) = lines.peek().copied() {
        if let Some(rest) = l.strip_prefix("beacons") {
            let b = rest
                .split_whitespace()
                .map(|s| s.parse::<usize>().map_err(|_| err(bl, format!("bad beacon `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if b.len() != d {
                return Err(err(bl, format!("expected {d} beacons, found {}", b.len())));
            }
            beacons = Some(b);
            lines.next();
        }
    }
    let mut pi0 = Vec::with_capacity(n);
    let mut pi1 = Vec::with_capacity(n);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        let want = if has_pi1 { 2 * d } else { d };
        if f.len() != want {
            return Err(err(line, format!("expected {want} fields, found {}", f.len())));
        }
        pi0.push(
            f[..d]
                .iter()
                .map(|s| s.parse::<Weight>().map_err(|e| err(line, e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        );
        if has_pi1 {
            pi1.push(
                f[d..]
                    .iter()
                    .map(|s| {
                        let (a, b) = s
                            .split_once(':')
                            .ok_or_else(|| err(line, format!("bad position pair `{s}`")))?;
                        let p = |x: &str| {
                            x.parse::<usize>()
                                .map_err(|_| err(line, format!("bad position `{x}`")))
                        };
                        Ok((p(a)?, p(b)?))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
    }
    if pi0.len() != n {
        return Err(err(hl, format!("header declares {n} vertices, found {}", pi0.len())));
    }
    Ok(Embedding {
        pi0,
        pi1: has_pi1.then_some(pi1),
        beacons,
    })
}

/// Right-hand side of the compact tie-break expression: `dist(s, t)` when
/// the plain beacon bound is tight, else that bound plus 2.
pub fn tiebreak_compact(plain: &Weight, dist: &Weight) -> Weight {
    if plain == dist {
        dist.clone()
    } else {
        plain + &Weight::integer(2)
    }
}
