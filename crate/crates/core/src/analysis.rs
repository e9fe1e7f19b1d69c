//! Validators and measurements: consistency, admissibility and
//! sub-additivity checks, the additive-overhead statistic, approximated-tie
//! detection, the crucial-coordinate audit, bad-pair counting and the
//! unique-shortest-path margin verifier.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::heuristics::{HeuristicError, HeuristicSpec};
use crate::numeric::{Length, Quantity, RadicalSum, Scale, Weight};
use crate::search::{dijkstra, kernel, TiePolicy};
use crate::with_lane;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error("heuristic is not consistent: {count} violations, first {first}")]
    Inconsistent { count: usize, first: Violation },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("{0} weights is too many for exhaustive search and no base-9 certificate applies")]
    TooManyWeights(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// `w(u, v) + h(v, t) - h(u, t) < 0`; vertices `[u, v, t]`.
    ReducedCost,
    /// `h(t, t) != 0`; vertices `[t]`.
    NonzeroAtTarget,
    /// `h(s, t) > dist(s, t)`; vertices `[s, t]`.
    Overestimate,
    /// `h(u, v) + h(v, w) < h(u, w)`; vertices `[u, v, w]`.
    Triangle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub vertices: Vec<usize>,
    /// Exact slack when every term is rational.
    pub slack: Option<Weight>,
    pub approx_slack: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} at {:?}, slack ", self.kind, self.vertices)?;
        match &self.slack {
            Some(s) => write!(f, "{s}"),
            None => write!(f, "~{}", self.approx_slack),
        }
    }
}

/// `Σ coeff · q + extra`: its sign, exact value when rational, and an
/// approximation.
fn signed_sum(terms: &[(i64, &Quantity)], extra: &Weight) -> (Ordering, Option<Weight>, f64) {
    let approx = terms.iter().map(|(c, q)| *c as f64 * q.to_f64()).sum::<f64>() + extra.to_f64();
    let radical_p = terms.iter().find_map(|(_, q)| match q {
        Quantity::Radical { p, .. } => Some(*p),
        Quantity::Rational(_) => None,
    });
    match radical_p {
        None => {
            let total = terms
                .iter()
                .map(|(c, q)| q.as_exact().expect("rational") * &Weight::integer(*c))
                .fold(extra.clone(), |a, b| a + b);
            (total.as_rational().cmp(&BigRational::zero()), Some(total), approx)
        }
        Some(p) => {
            let mut sum = RadicalSum::new(p);
            sum.add_rational(extra.as_rational());
            for (c, q) in terms {
                let c = BigRational::from_integer(BigInt::from(*c));
                match q {
                    Quantity::Rational(w) => sum.add_rational(&(&c * w.as_rational())),
                    Quantity::Radical { offset, radicand, .. } => {
                        sum.add_rational(&(&c * offset.as_rational()));
                        sum.add_root(c, radicand.as_rational());
                    }
                }
            }
            (sum.sign(&BigRational::zero()), None, approx)
        }
    }
}

/// `h(·, t)` for every requested target.
fn target_values(
    g: &Graph,
    h: &HeuristicSpec,
    targets: &BTreeSet<usize>,
) -> Result<BTreeMap<usize, Vec<Quantity>>, HeuristicError> {
    let lane = h.lane(g)?;
    with_lane!(lane.small, L => {
        let prepared = h.prepare::<L>(g, &lane.scale)?;
        let zero = L::zero();
        Ok(targets
            .par_iter()
            .map(|&t| {
                let est = prepared.for_target(t);
                (t, (0..g.n()).map(|u| est.key(&zero, u, &lane.scale)).collect())
            })
            .collect())
    })
}

fn violation(kind: ViolationKind, vertices: Vec<usize>, s: (Ordering, Option<Weight>, f64)) -> Violation {
    Violation {
        kind,
        vertices,
        slack: s.1,
        approx_slack: s.2,
    }
}

/// Reduced-cost and `h(t, t) = 0` violations for every target in `targets`.
pub fn check_consistency(g: &Graph, h: &HeuristicSpec, targets: &[usize]) -> Result<Vec<Violation>, HeuristicError> {
    let set: BTreeSet<usize> = targets.iter().copied().collect();
    let values = target_values(g, h, &set)?;
    let mut out: Vec<Violation> = values
        .par_iter()
        .flat_map_iter(|(&t, hv)| {
            let mut found = Vec::new();
            let at_t = signed_sum(&[(1, &hv[t])], &Weight::zero());
            if at_t.0 != Ordering::Equal {
                found.push(violation(ViolationKind::NonzeroAtTarget, vec![t], at_t));
            }
            for u in 0..g.n() {
                for (v, w) in g.neighbors(u) {
                    let s = signed_sum(&[(1, &hv[*v]), (-1, &hv[u])], w);
                    if s.0 == Ordering::Less {
                        found.push(violation(ViolationKind::ReducedCost, vec![u, *v, t], s));
                    }
                }
            }
            found
        })
        .collect();
    out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(out)
}

/// Pairs `(s, t)` with `h(s, t) > dist(s, t)`; slack is `dist - h`.
pub fn check_admissibility(
    g: &Graph,
    h: &HeuristicSpec,
    pairs: &[(usize, usize)],
) -> Result<Vec<Violation>, HeuristicError> {
    let targets: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    let values = target_values(g, h, &targets)?;
    let dists: BTreeMap<usize, Vec<Weight>> = targets.par_iter().map(|&t| (t, dijkstra(g, t).0)).collect();
    let mut out: Vec<Violation> = pairs
        .par_iter()
        .filter_map(|&(s, t)| {
            let r = signed_sum(&[(-1, &values[&t][s])], &dists[&t][s]);
            (r.0 == Ordering::Less).then(|| violation(ViolationKind::Overestimate, vec![s, t], r))
        })
        .collect();
    out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(out)
}

/// Triples `(u, v, w)` with `h(u, v) + h(v, w) < h(u, w)`.
pub fn check_subadditivity(
    g: &Graph,
    h: &HeuristicSpec,
    triples: &[(usize, usize, usize)],
) -> Result<Vec<Violation>, HeuristicError> {
    let targets: BTreeSet<usize> = triples.iter().flat_map(|&(_, v, w)| [v, w]).collect();
    let values = target_values(g, h, &targets)?;
    let mut out: Vec<Violation> = triples
        .par_iter()
        .filter_map(|&(u, v, w)| {
            let r = signed_sum(
                &[(1, &values[&v][u]), (1, &values[&w][v]), (-1, &values[&w][u])],
                &Weight::zero(),
            );
            (r.0 == Ordering::Less).then(|| violation(ViolationKind::Triangle, vec![u, v, w], r))
        })
        .collect();
    out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(out)
}

/// Every ordered triple when `n³ <= count`, else `count` triples drawn
/// uniformly with replacement; sorted.
pub fn sample_triples(n: usize, count: usize, seed: u64) -> Vec<(usize, usize, usize)> {
    let mut out: Vec<(usize, usize, usize)> = if n.checked_pow(3).is_some_and(|c| c <= count) {
        (0..n)
            .flat_map(|u| (0..n).flat_map(move |v| (0..n).map(move |w| (u, v, w))))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect()
    };
    out.sort_unstable();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverheadMode {
    /// `|must ∪ P(s, t)| - p(s, t)`: the cheapest tie-breaking possible.
    Optimal,
    /// Pops of an actual A* run under a tie policy.
    Policy(TiePolicy),
}

impl OverheadMode {
    pub fn name(&self) -> String {
        match self {
            OverheadMode::Optimal => "optimal".into(),
            OverheadMode::Policy(p) => format!("policy:{}", p.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairSource {
    /// Ordered pairs `s != t`.
    AllPairs,
    /// `count` ordered pairs with `s != t`, drawn uniformly with replacement.
    Sampled { seed: u64, count: usize },
    Explicit(Vec<(usize, usize)>),
}

impl PairSource {
    pub fn pairs(&self, n: usize) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = match self {
            PairSource::AllPairs => (0..n)
                .flat_map(|s| (0..n).filter(move |t| *t != s).map(move |t| (s, t)))
                .collect(),
            PairSource::Sampled { seed, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|_| {
                        let s = rng.gen_range(0..n);
                        let t = (s + rng.gen_range(1..n)) % n;
                        (s, t)
                    })
                    .collect()
            }
            PairSource::Explicit(p) => p.clone(),
        };
        out.sort_unstable();
        out
    }

    pub fn name(&self) -> String {
        match self {
            PairSource::AllPairs => "all-pairs".into(),
            PairSource::Sampled { seed, count } => format!("sampled:{seed}:{count}"),
            PairSource::Explicit(p) => format!("explicit:{}", p.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub s: usize,
    pub t: usize,
    pub scanned: usize,
    pub path_vertices: usize,
    pub overhead: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverheadReport {
    pub mode: OverheadMode,
    pub source: PairSource,
    pub heuristic: String,
    pub n: usize,
    /// Sorted by `(s, t)`.
    pub records: Vec<PairRecord>,
    pub total_pairs: usize,
    /// Mean over the measured pairs (diagonal excluded).
    pub mean_overhead: Weight,
    /// The same mean with the `s = t` diagonal counted as 0 at its natural
    /// weight `1/n`; absent for explicit pair lists.
    pub mean_with_diagonal: Option<Weight>,
    /// 95% Hoeffding half-width from the bound `0 <= overhead <= n`; sampled mode only.
    pub half_width: Option<f64>,
}

impl OverheadReport {
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "heuristic = {}", self.heuristic);
        let _ = writeln!(out, "mode = {}", self.mode.name());
        let _ = writeln!(out, "pairs = {}", self.source.name());
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "total-pairs = {}", self.total_pairs);
        let _ = writeln!(out, "mean-overhead = {} (~{:.6})", self.mean_overhead, self.mean_overhead.to_f64());
        if let Some(m) = &self.mean_with_diagonal {
            let _ = writeln!(out, "mean-overhead-with-diagonal = {} (~{:.6})", m, m.to_f64());
        }
        if let Some(hw) = self.half_width {
            let _ = writeln!(out, "half-width-95 = {hw:.6}");
        }
        out
    }
}

/// Mean additive overhead of `h` over a pair source. Optimal mode requires
/// a consistent heuristic; heuristics not consistent by construction are
/// checked on up to 32 targets first.
pub fn measure_overhead(
    g: &Graph,
    h: &HeuristicSpec,
    source: &PairSource,
    mode: OverheadMode,
) -> Result<OverheadReport, AnalysisError> {
    let n = g.n();
    if n < 2 && !matches!(source, PairSource::Explicit(_)) {
        return Err(AnalysisError::Param("need at least two vertices".into()));
    }
    let pairs = source.pairs(n);
    if pairs.iter().any(|&(s, t)| s >= n || t >= n) {
        return Err(AnalysisError::Param("pair vertex out of range".into()));
    }
    if pairs.is_empty() {
        return Err(AnalysisError::Param("no pairs to measure".into()));
    }
    if mode == OverheadMode::Optimal && !h.is_consistent_by_construction() {
        let targets: Vec<usize> = if n <= 32 {
            (0..n).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut t = rand::seq::index::sample(&mut rng, n, 32).into_vec();
            t.sort_unstable();
            t
        };
        let v = check_consistency(g, h, &targets)?;
        if let Some(first) = v.first() {
            return Err(AnalysisError::Inconsistent {
                count: v.len(),
                first: first.clone(),
            });
        }
    }
    let records = overhead_records(g, h, &pairs, mode)?;
    let total: i64 = records.iter().map(|r| r.overhead).sum();
    let count = records.len();
    let mean = Weight::new(total, count as i64);
    let mean_with_diagonal = match source {
        PairSource::Explicit(_) => None,
        _ => Some(&mean * &Weight::new(n as i64 - 1, n as i64)),
    };
    let half_width = match source {
        PairSource::Sampled { .. } => Some(n as f64 * ((2.0f64 / 0.05).ln() / (2.0 * count as f64)).sqrt()),
        _ => None,
    };
    Ok(OverheadReport {
        mode,
        source: source.clone(),
        heuristic: h.name().into(),
        n,
        records,
        total_pairs: count,
        mean_overhead: mean,
        mean_with_diagonal,
        half_width,
    })
}

fn overhead_records(
    g: &Graph,
    h: &HeuristicSpec,
    pairs: &[(usize, usize)],
    mode: OverheadMode,
) -> Result<Vec<PairRecord>, HeuristicError> {
    let lane = h.lane(g)?;
    let mut by_target: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(s, t) in pairs {
        by_target.entry(t).or_default().push(s);
    }
    let sources: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    with_lane!(lane.small, L => {
        let sg = g.scaled::<L>(&lane.scale);
        let prepared = h.prepare::<L>(g, &lane.scale)?;
        let trees: BTreeMap<usize, (Vec<L>, Vec<usize>, Vec<usize>)> = sources
            .par_iter()
            .map(|&s| (s, kernel::max_hop_tree(&sg, s)))
            .collect();
        let mut records: Vec<PairRecord> = by_target
            .par_iter()
            .flat_map_iter(|(&t, ss)| {
                let est = prepared.for_target(t);
                let (trees, sg) = (&trees, &sg);
                ss.iter().map(move |&s| {
                    let (dist, hops, parent) = &trees[&s];
                    let p = hops[t] + 1;
                    let scanned = match mode {
                        OverheadMode::Optimal => {
                            let strict = |u: usize| est.cmp_bound(&dist[u], u, &dist[t]) == Ordering::Less;
                            let must = (0..dist.len()).filter(|&u| strict(u)).count();
                            let mut off_must = 0;
                            let mut x = t;
                            loop {
                                if !strict(x) {
                                    off_must += 1;
                                }
                                if x == s {
                                    break;
                                }
                                x = parent[x];
                            }
                            must + off_must
                        }
                        OverheadMode::Policy(tie) => kernel::astar(sg, s, t, &est, tie).len(),
                    };
                    PairRecord {
                        s,
                        t,
                        scanned,
                        path_vertices: p,
                        overhead: scanned as i64 - p as i64,
                    }
                })
            })
            .collect();
        records.sort_by_key(|r| (r.s, r.t));
        Ok(records)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieCertificate {
    /// One entry per input weight, each in `-bound..=bound`, not all zero.
    pub coefficients: Vec<i64>,
    /// `|Σ c_i w_i|`, recomputed exactly.
    pub value: Weight,
    /// Indices with a nonzero coefficient.
    pub indices: Vec<usize>,
}

fn certificate(weights: &[Weight], coefficients: Vec<i64>) -> TieCertificate {
    let value = weights
        .iter()
        .zip(&coefficients)
        .map(|(w, c)| w * &Weight::integer(*c))
        .sum::<Weight>()
        .abs();
    let indices = coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, _)| i)
        .collect();
    TieCertificate {
        coefficients,
        value,
        indices,
    }
}

/// Largest input handled by exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Looks for integer coefficients in `-bound..=bound`, not all zero, with
/// `|Σ c_i w_i| <= epsilon`. Exhaustive (meet in the middle) for up to
/// [`EXHAUSTIVE_LIMIT`] weights; beyond that only the base-9 certificate
/// of [`base9_tie_free`] can answer.
pub fn detect_approximated_tie(
    weights: &[Weight],
    epsilon: &Weight,
    bound: u32,
) -> Result<Option<TieCertificate>, AnalysisError> {
    if epsilon.is_negative() {
        return Err(AnalysisError::Param("epsilon must be non-negative".into()));
    }
    if bound == 0 || weights.is_empty() {
        return Ok(None);
    }
    if weights.len() > EXHAUSTIVE_LIMIT {
        return if bound <= 4 && base9_tie_free(weights, epsilon) {
            Ok(None)
        } else {
            Err(AnalysisError::TooManyWeights(weights.len()))
        };
    }
    let scale = Scale::of(weights.iter().chain([epsilon]));
    let ints: Vec<BigInt> = weights.iter().map(|w| scale.lift_big(w)).collect();
    let eps = scale.lift_big(epsilon);
    let magnitude: BigInt = ints.iter().map(|x| x.abs()).sum::<BigInt>() * bound + &eps;
    let found = if magnitude < BigInt::one() << 120 {
        let ints: Vec<i128> = ints.iter().map(|x| x.to_i128().expect("checked")).collect();
        meet_in_middle(&ints, &eps.to_i128().expect("checked"), bound as i64)
    } else {
        meet_in_middle(&ints, &eps, bound as i64)
    };
    Ok(found.map(|c| certificate(weights, c)))
}

fn half_sums<L: Length + std::ops::Mul<Output = L> + From<i64>>(ws: &[L], bound: i64) -> Vec<(L, usize)> {
    let base = (2 * bound + 1) as usize;
    let mut sums = vec![(L::zero(), 0usize)];
    for (i, w) in ws.iter().enumerate() {
        let stride = base.pow(i as u32);
        let mut next = Vec::with_capacity(sums.len() * base);
        for c in -bound..=bound {
            let digit = (c + bound) as usize;
            let term = w.clone() * L::from(c);
            next.extend(sums.iter().map(|(s, code)| (s.add_ref(&term), code + digit * stride)));
        }
        sums = next;
    }
    sums
}

fn decode(mut code: usize, len: usize, bound: i64) -> Vec<i64> {
    let base = (2 * bound + 1) as usize;
    (0..len)
        .map(|_| {
            let d = (code % base) as i64 - bound;
            code /= base;
            d
        })
        .collect()
}

fn meet_in_middle<L>(ws: &[L], eps: &L, bound: i64) -> Option<Vec<i64>>
where
    L: Length + std::ops::Mul<Output = L> + std::ops::Neg<Output = L> + From<i64>,
{
    let (left, right) = ws.split_at(ws.len() / 2);
    let mut a = half_sums(left, bound);
    a.sort_unstable_by(|x, y| x.0.cmp(&y.0));
    let zero_code = |len: usize| -> usize {
        let base = (2 * bound + 1) as usize;
        (0..len).map(|i| bound as usize * base.pow(i as u32)).sum()
    };
    let (za, zb) = (zero_code(left.len()), zero_code(right.len()));
    for (bsum, bcode) in half_sums(right, bound) {
        // Need a + b in [-eps, eps], i.e. a in [-b - eps, -b + eps].
        let lo = -bsum.clone() - eps.clone();
        let hi = -bsum.clone() + eps.clone();
        let start = a.partition_point(|x| x.0 < lo);
        for (asum, acode) in &a[start..] {
            if *asum > hi {
                break;
            }
            if *acode == za && bcode == zb {
                continue;
            }
            let mut c = decode(*acode, left.len(), bound);
            c.extend(decode(bcode, right.len(), bound));
            return Some(c);
        }
    }
    None
}

/// Analytic certificate for weights `int_i + 1/9^(k_i)` with distinct
/// `k_i >= 1`: with `M = max k_i`, any nonzero coefficient vector in
/// `{-4..4}` gives a fractional part that is a nonzero balanced base-9
/// numeral of magnitude in `[1/9^M, 1/2)`. Returns true when that
/// rules out every combination within `epsilon` (coefficient bound 4).
pub fn base9_tie_free(weights: &[Weight], epsilon: &Weight) -> bool {
    if weights.is_empty() {
        return true;
    }
    let nine = BigInt::from(9);
    let mut ks = Vec::with_capacity(weights.len());
    for w in weights {
        let frac = w - &w.floor();
        if !frac.numer().is_one() {
            return false;
        }
        let mut d = frac.denom().clone();
        let mut k = 0usize;
        while (&d % &nine).is_zero() {
            d /= &nine;
            k += 1;
        }
        if !d.is_one() || k == 0 {
            return false;
        }
        ks.push(k);
    }
    let distinct: BTreeSet<usize> = ks.iter().copied().collect();
    if distinct.len() != ks.len() {
        return false;
    }
    let m = *distinct.iter().max().expect("nonempty");
    let unit = Weight::new(1, Pow::pow(&nine, m));
    if *epsilon >= Weight::new(1, 2) {
        return false;
    }
    if *epsilon < unit {
        return true;
    }
    // The only combinations with |fraction| = 1/9^M are ± the weight with
    // k = M alone, whose integer part then keeps the total at least 1/2.
    let lowest = ks.iter().position(|&k| k == m).expect("present");
    let int_part = weights[lowest].floor();
    *epsilon < &unit * &Weight::integer(2) && !int_part.is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCertificate {
    pub coordinate: usize,
    /// `v_0, .., v_{L-1}`; edges `v_j -> v_{j+1 mod L}` are crucial pairs.
    pub vertices: Vec<usize>,
    /// `sign(π_i(v_{j+1}) - π_i(v_j))` per edge.
    pub signs: Vec<i64>,
    /// `Σ signs_j · dist(v_j, v_{j+1})`.
    pub sum: Weight,
    /// `L · slack`.
    pub bound: Weight,
    /// `|sum| <= bound`, recomputed from scratch.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub slack: Weight,
    /// Crucial pairs per coordinate.
    pub crucial: Vec<Vec<(usize, usize)>>,
    pub distorted: Vec<(usize, usize)>,
    pub cycle: Option<CycleCertificate>,
}

impl AuditReport {
    pub fn counts(&self) -> Vec<usize> {
        self.crucial.iter().map(Vec::len).collect()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "slack = {}", self.slack);
        let _ = writeln!(out, "coordinates = {}", self.crucial.len());
        let _ = writeln!(out, "max-crucial-pairs = {}", self.counts().into_iter().max().unwrap_or(0));
        let _ = writeln!(out, "distorted-pairs = {}", self.distorted.len());
        match &self.cycle {
            Some(c) => {
                let _ = writeln!(
                    out,
                    "cycle = coordinate {} vertices {:?} sum {} bound {} verified {}",
                    c.coordinate, c.vertices, c.sum, c.bound, c.verified
                );
            }
            None => {
                let _ = writeln!(out, "cycle = none");
            }
        }
        out
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
}

/// Path between `a` and `b` in a forest given as adjacency lists.
fn forest_path(adj: &BTreeMap<usize, Vec<usize>>, a: usize, b: usize) -> Vec<usize> {
    let mut prev = BTreeMap::new();
    prev.insert(a, a);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for &y in adj.get(&x).into_iter().flatten() {
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(y) {
                e.insert(x);
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![b];
    let mut x = b;
    while x != a {
        x = prev[&x];
        path.push(x);
    }
    path.reverse();
    path
}

/// For each coordinate, the pairs `(u, v)` of `pairs` with
/// `|π_i(u) - π_i(v)| >= dist(u, v) - slack`; the pairs with no such
/// coordinate are distorted. The first cycle found in any coordinate's
/// graph of crucial pairs is reported with its ±1 distance sum.
pub fn audit_crucial_coordinates(
    g: &Graph,
    emb: &crate::heuristics::Embedding,
    pairs: &[(usize, usize)],
    slack: &Weight,
) -> Result<AuditReport, HeuristicError> {
    emb.validate(g.n())?;
    let sources: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let dists: BTreeMap<usize, Vec<Weight>> = sources.par_iter().map(|&s| (s, dijkstra(g, s).0)).collect();
    let dist = |u: usize, v: usize| -> &Weight { &dists[&u][v] };
    let mut crucial = vec![Vec::new(); emb.dim()];
    let mut distorted = Vec::new();
    for &(u, v) in pairs {
        let need = dist(u, v) - slack;
        let mut any = false;
        for (i, list) in crucial.iter_mut().enumerate() {
            if (&emb.pi0[u][i] - &emb.pi0[v][i]).abs() >= need {
                list.push((u, v));
                any = true;
            }
        }
        if !any {
            distorted.push((u, v));
        }
    }
    let mut cycle = None;
    'coords: for (i, list) in crucial.iter().enumerate() {
        let mut uf = UnionFind((0..g.n()).collect());
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(u, v) in list {
            let (ru, rv) = (uf.find(u), uf.find(v));
            if ru == rv {
                // Already connected: the forest path plus (u, v) is a cycle.
                let vertices = forest_path(&adj, v, u);
                cycle = Some(cycle_certificate(g, emb, i, vertices, slack));
                break 'coords;
            }
            uf.0[ru] = rv;
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
    }
    Ok(AuditReport {
        slack: slack.clone(),
        crucial,
        distorted,
        cycle,
    })
}

fn cycle_certificate(
    g: &Graph,
    emb: &crate::heuristics::Embedding,
    coordinate: usize,
    vertices: Vec<usize>,
    slack: &Weight,
) -> CycleCertificate {
    let len = vertices.len();
    let mut signs = Vec::with_capacity(len);
    let mut sum = Weight::zero();
    for j in 0..len {
        let (a, b) = (vertices[j], vertices[(j + 1) % len]);
        let diff = &emb.pi0[b][coordinate] - &emb.pi0[a][coordinate];
        let sign = if diff.is_negative() { -1 } else { 1 };
        signs.push(sign);
        let d = dijkstra(g, a).0[b].clone();
        sum = sum + d * Weight::integer(sign);
    }
    let bound = slack * &Weight::integer(len as i64);
    let verified = sum.abs() <= bound;
    CycleCertificate {
        coordinate,
        vertices,
        signs,
        sum,
        bound,
        verified,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadPairReport {
    pub threshold: Weight,
    pub bad: Vec<(usize, usize)>,
    pub total: usize,
}

/// Pairs with `h(u, v) < dist(u, v) - threshold`.
pub fn count_bad_pairs(
    g: &Graph,
    h: &HeuristicSpec,
    pairs: &[(usize, usize)],
    threshold: &Weight,
) -> Result<BadPairReport, HeuristicError> {
    let targets: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    let values = target_values(g, h, &targets)?;
    let dists: BTreeMap<usize, Vec<Weight>> = targets.par_iter().map(|&t| (t, dijkstra(g, t).0)).collect();
    let mut bad: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|&&(u, v)| {
            let budget = &dists[&v][u] - threshold;
            signed_sum(&[(1, &values[&v][u])], &-budget).0 == Ordering::Less
        })
        .copied()
        .collect();
    bad.sort_unstable();
    Ok(BadPairReport {
        threshold: threshold.clone(),
        bad,
        total: pairs.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UspReport {
    pub margin: Weight,
    pub pass: bool,
    /// Smallest `second - dist` over pairs with a second simple path.
    pub min_margin: Option<Weight>,
    pub witness: Option<(usize, usize)>,
}

/// Checks `second_shortest(s, t) - dist(s, t) > margin` for every pair;
/// pairs without a second simple path pass vacuously.
pub fn verify_usp_margin(g: &Graph, margin: &Weight) -> UspReport {
    let n = g.n();
    let scale = g.scale();
    let small = g.fits_small_lane(&scale);
    let worst: Option<(Weight, usize, usize)> = with_lane!(small, L => {
        let sg = g.scaled::<L>(&scale);
        (0..n)
            .into_par_iter()
            .filter_map(|s| {
                let tree = kernel::sssp_tree(&sg, s);
                let mut best: Option<(L, usize)> = None;
                for t in s + 1..n {
                    if let Some(sec) = kernel::second_shortest(&sg, s, t, &tree) {
                        let gap = sec - tree.0[t].clone();
                        if best.as_ref().is_none_or(|b| gap < b.0) {
                            best = Some((gap, t));
                        }
                    }
                }
                best.map(|(gap, t)| (scale.lower(&gap), s, t))
            })
            .min_by(|a, b| a.0.cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))))
    });
    let pass = worst.as_ref().is_none_or(|w| w.0 > *margin);
    UspReport {
        margin: margin.clone(),
        pass,
        min_margin: worst.as_ref().map(|w| w.0.clone()),
        witness: worst.map(|w| (w.1, w.2)),
    }
}

/// `|Σ c_i w_i|` for a caller-supplied coefficient vector, for checking
/// certificates independently.
pub fn combination_value(weights: &[Weight], coefficients: &[i64]) -> Weight {
    certificate(weights, coefficients.to_vec()).value
}
