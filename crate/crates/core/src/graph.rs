//! Immutable undirected graphs with exact edge weights, plus the edge-list
//! text format.
//!
//! ```text
//! # comment
//! n m
//! u v p/q
//! ```

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::numeric::{small_lane_limit, Length, RationalParseError, Scale, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) has non-positive weight {w}")]
    NonPositiveWeight { u: usize, v: usize, w: Weight },
    #[error("graph is disconnected: vertex {0} unreachable from vertex 0")]
    Disconnected(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Rational {
        line: usize,
        source: RationalParseError,
    },
    #[error(transparent)]
    Invalid(#[from] GraphError),
}

/// Simple connected undirected graph. Adjacency lists are sorted by
/// neighbor index, so two graphs with the same edge set compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<(usize, Weight)>>,
    labels: Vec<Option<String>>,
    edge_count: usize,
}

/// Validates and builds a graph from an edge list.
pub fn build_graph(n: usize, edges: Vec<(usize, usize, Weight)>) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut adjacency: Vec<Vec<(usize, Weight)>> = vec![Vec::new(); n];
    let edge_count = edges.len();
    for (u, v, w) in edges {
        if u >= n || v >= n {
            return Err(GraphError::VertexOutOfRange { u, v, n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !w.is_positive() {
            return Err(GraphError::NonPositiveWeight { u, v, w });
        }
        adjacency[u].push((v, w.clone()));
        adjacency[v].push((u, w));
    }
    for (u, list) in adjacency.iter_mut().enumerate() {
        list.sort_by_key(|(v, _)| *v);
        if let Some(pair) = list.windows(2).find(|p| p[0].0 == p[1].0) {
            let (a, b) = (u.min(pair[0].0), u.max(pair[0].0));
            return Err(GraphError::DuplicateEdge(a, b));
        }
    }
    let graph = Graph {
        adjacency,
        labels: vec![None; n],
        edge_count,
    };
    if let Some(v) = graph.first_unreachable() {
        return Err(GraphError::Disconnected(v));
    }
    Ok(graph)
}

impl Graph {
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, Weight)] {
        &self.adjacency[u]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&Weight> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |(x, _)| *x)
            .ok()
            .map(|i| &list[i].1)
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Weight)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |(v, _)| u < *v)
                .map(move |(v, w)| (u, *v, w))
        })
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) {
        self.labels[v] = Some(label.into());
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Graph {
        assert_eq!(labels.len(), self.n());
        self.labels = labels;
        self
    }

    pub fn total_weight(&self) -> Weight {
        self.edges().map(|(_, _, w)| w.clone()).sum()
    }

    /// Common denominator of all edge weights.
    pub fn scale(&self) -> Scale {
        Scale::of(self.edges().map(|(_, _, w)| w))
    }

    /// Integer adjacency on `scale`, which must cover every edge weight.
    pub fn scaled<L: Length>(&self, scale: &Scale) -> ScaledGraph<L> {
        ScaledGraph {
            adj: self
                .adjacency
                .iter()
                .map(|list| list.iter().map(|(v, w)| (*v, scale.lift(w))).collect())
                .collect(),
            scale: scale.clone(),
        }
    }

    /// Whether all path lengths on `scale` fit the `i128` lane.
    pub fn fits_small_lane(&self, scale: &Scale) -> bool {
        scale.lift_big(&self.total_weight()) < small_lane_limit()
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for (v, _) in &self.adjacency[u] {
                if !seen[*v] {
                    seen[*v] = true;
                    queue.push_back(*v);
                }
            }
        }
        seen.iter().position(|s| !s)
    }
}

/// Adjacency with weights lifted to integers on a common scale.
#[derive(Clone, Debug)]
pub struct ScaledGraph<L> {
    pub adj: Vec<Vec<(usize, L)>>,
    pub scale: Scale,
}

impl<L: Length> ScaledGraph<L> {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&L> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |(x, _)| *x)
            .ok()
            .map(|i| &list[i].1)
    }
}

pub fn parse_graph_file(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(ParseError::Malformed {
        line: 1,
        msg: "missing `n m` header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse_count = |s: &str| {
        s.parse::<usize>().map_err(|_| ParseError::Malformed {
            line: hline,
            msg: format!("bad count `{s}`"),
        })
    };
    if fields.len() != 2 {
        return Err(ParseError::Malformed {
            line: hline,
            msg: "header must be `n m`".into(),
        });
    }
    let n = parse_count(fields[0])?;
    let m = parse_count(fields[1])?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(ParseError::Malformed {
                line,
                msg: "edge line must be `u v p/q`".into(),
            });
        }
        let idx = |s: &str| {
            s.parse::<usize>().map_err(|_| ParseError::Malformed {
                line,
                msg: format!("bad vertex `{s}`"),
            })
        };
        let w: Weight = f[2]
            .parse()
            .map_err(|source| ParseError::Rational { line, source })?;
        edges.push((idx(f[0])?, idx(f[1])?, w));
    }
    if edges.len() != m {
        return Err(ParseError::Malformed {
            line: hline,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok(build_graph(n, edges)?)
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for (u, v, w) in g.edges() {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

/// Shorthand for integer edge lists in tests and examples.
pub fn graph_from_ints(n: usize, edges: &[(usize, usize, i64)]) -> Result<Graph, GraphError> {
    build_graph(
        n,
        edges
            .iter()
            .map(|&(u, v, w)| (u, v, Weight::integer(BigInt::from(w))))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_smallest_graph() {
        let g = graph_from_ints(2, &[(0, 1, 1)]).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.weight(1, 0), Some(&Weight::one()));
    }

    #[test]
    fn rejects_each_invalid_input_distinctly() {
        assert_eq!(
            graph_from_ints(3, &[(0, 1, 1)]),
            Err(GraphError::Disconnected(2))
        );
        assert_eq!(
            graph_from_ints(2, &[(0, 1, 1), (1, 0, 2)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            graph_from_ints(2, &[(0, 1, 0)]),
            Err(GraphError::NonPositiveWeight { .. })
        ));
        assert_eq!(
            graph_from_ints(2, &[(0, 0, 1)]),
            Err(GraphError::SelfLoop(0))
        );
        assert!(matches!(
            graph_from_ints(2, &[(0, 2, 1)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert_eq!(build_graph(0, vec![]), Err(GraphError::Empty));
        assert!(build_graph(1, vec![]).is_ok());
    }

    #[test]
    fn parses_edge_list() {
        let g = parse_graph_file("2 1\n0 1 1/1").unwrap();
        assert_eq!(g, graph_from_ints(2, &[(0, 1, 1)]).unwrap());
        let g = parse_graph_file("# triangle\n3 3\n0 1 1\n1 2 2/1 # inline\n0 2 14/2\n").unwrap();
        assert_eq!(g.weight(0, 2), Some(&Weight::integer(7)));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_graph_file("2 1\n0 1 -1/2"),
            Err(ParseError::Invalid(GraphError::NonPositiveWeight { .. }))
        ));
        assert!(matches!(
            parse_graph_file("2 1\n0 1 1/0"),
            Err(ParseError::Rational { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph_file("2 2\n0 1 1"),
            Err(ParseError::Malformed { .. })
        ));
        assert!(matches!(
            parse_graph_file("2 1\n0 1"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(parse_graph_file(""), Err(ParseError::Malformed { .. })));
    }

    #[test]
    fn serialize_is_canonical() {
        let g = graph_from_ints(3, &[(2, 1, 2), (0, 1, 1), (0, 2, 7)]).unwrap();
        assert_eq!(serialize_graph(&g), "3 3\n0 1 1/1\n0 2 7/1\n1 2 2/1\n");
    }
}
