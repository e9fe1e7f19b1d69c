//! Node-weighted grids and their conversion to edge-weighted graphs.
//!
//! Cells are addressed by integer coordinates `(x, y)` with `x` growing
//! to the left and `y` growing upward. A grid's bounding box is
//! `width × height` cells whose upper-left cell sits at `origin`; in
//! display order row `r`, column `c` is the cell `(origin.x - c, origin.y - r)`.
//! Positions inside the box may be absent, so L-shaped layouts are allowed.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_graph, Graph, GraphError};
use crate::numeric::Weight;

pub type Cell = (i64, i64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("cell {0:?} lies outside the {1}x{2} bounding box")]
    OutOfBounds(Cell, usize, usize),
    #[error("cell {0:?} has non-positive weight {1}")]
    NonPositiveWeight(Cell, Weight),
    #[error("blocked pair {0:?}-{1:?} is not two adjacent cells")]
    NotAdjacent(Cell, Cell),
    #[error("blocked pair references missing cell {0:?}")]
    MissingCell(Cell),
    #[error("grid file: {0}")]
    Format(String),
    #[error("edge {0:?}-{1:?} has weight {2}, expected half the cell sum {3}")]
    EdgeMismatch(Cell, Cell, Weight, Weight),
    #[error("edge between non-adjacent cells {0:?} and {1:?}")]
    EdgeNotAdjacent(Cell, Cell),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub origin: Cell,
    pub cells: BTreeMap<Cell, Weight>,
    blocked: BTreeSet<(Cell, Cell)>,
}

fn ordered(a: Cell, b: Cell) -> (Cell, Cell) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn adjacent(a: Cell, b: Cell) -> bool {
    (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1
}

impl GridSpec {
    pub fn new(
        width: usize,
        height: usize,
        origin: Cell,
        cells: BTreeMap<Cell, Weight>,
        blocked: impl IntoIterator<Item = (Cell, Cell)>,
    ) -> Result<GridSpec, GridError> {
        let spec = GridSpec {
            width,
            height,
            origin,
            cells,
            blocked: blocked.into_iter().map(|(a, b)| ordered(a, b)).collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Full rectangle with `weights[r][c]` in display order and its
    /// upper-left cell at `(width - 1, height - 1)`, so that the
    /// lower-right cell is `(0, 0)`.
    pub fn rectangle(
        weights: Vec<Vec<Weight>>,
        blocked: impl IntoIterator<Item = (Cell, Cell)>,
    ) -> Result<GridSpec, GridError> {
        let height = weights.len();
        let width = weights.first().map_or(0, |r| r.len());
        let origin = (width as i64 - 1, height as i64 - 1);
        let mut cells = BTreeMap::new();
        for (r, row) in weights.into_iter().enumerate() {
            if row.len() != width {
                return Err(GridError::Format("ragged weight rows".into()));
            }
            for (c, w) in row.into_iter().enumerate() {
                cells.insert((origin.0 - c as i64, origin.1 - r as i64), w);
            }
        }
        GridSpec::new(width, height, origin, cells, blocked)
    }

    pub fn blocked(&self) -> &BTreeSet<(Cell, Cell)> {
        &self.blocked
    }

    pub fn is_blocked(&self, a: Cell, b: Cell) -> bool {
        self.blocked.contains(&ordered(a, b))
    }

    pub fn weight(&self, c: Cell) -> Option<&Weight> {
        self.cells.get(&c)
    }

    /// Display position `(row, column)` of a cell.
    pub fn position(&self, c: Cell) -> (i64, i64) {
        (self.origin.1 - c.1, self.origin.0 - c.0)
    }

    fn in_bounds(&self, c: Cell) -> bool {
        let (r, col) = self.position(c);
        r >= 0 && col >= 0 && (r as usize) < self.height && (col as usize) < self.width
    }

    fn validate(&self) -> Result<(), GridError> {
        for (c, w) in &self.cells {
            if !self.in_bounds(*c) {
                return Err(GridError::OutOfBounds(*c, self.width, self.height));
            }
            if !w.is_positive() {
                return Err(GridError::NonPositiveWeight(*c, w.clone()));
            }
        }
        for (a, b) in &self.blocked {
            if !adjacent(*a, *b) {
                return Err(GridError::NotAdjacent(*a, *b));
            }
            for c in [a, b] {
                if !self.cells.contains_key(c) {
                    return Err(GridError::MissingCell(*c));
                }
            }
        }
        Ok(())
    }

    /// Cells in display order (top row first, left to right).
    pub fn display_order(&self) -> Vec<Cell> {
        let mut cells: Vec<Cell> = self.cells.keys().copied().collect();
        cells.sort_by_key(|c| self.position(*c));
        cells
    }
}

/// Bijection between grid cells and graph vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridIndex {
    pub cell_of: Vec<Cell>,
    pub vertex_of: BTreeMap<Cell, usize>,
}

impl GridIndex {
    pub fn vertex(&self, c: Cell) -> usize {
        self.vertex_of[&c]
    }
}

/// One vertex per cell; each unblocked adjacent pair `(a, b)` becomes an
/// edge of weight `(w(a) + w(b)) / 2`. A path's length is therefore the
/// sum of its cell weights minus half the weights of its two endpoints.
pub fn grid_to_graph(spec: &GridSpec) -> Result<(Graph, GridIndex), GridError> {
    let cell_of = spec.display_order();
    let vertex_of: BTreeMap<Cell, usize> =
        cell_of.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let two = Weight::integer(2);
    let mut edges = Vec::new();
    for (u, &c) in cell_of.iter().enumerate() {
        for nb in [(c.0 - 1, c.1), (c.0, c.1 - 1)] {
            let Some(&v) = vertex_of.get(&nb) else {
                continue;
            };
            if spec.is_blocked(c, nb) {
                continue;
            }
            let w = (&spec.cells[&c] + &spec.cells[&nb]) / two.clone();
            edges.push((u.min(v), u.max(v), w));
        }
    }
    let labels = cell_of
        .iter()
        .map(|(x, y)| Some(format!("v({x},{y})")))
        .collect();
    let graph = build_graph(cell_of.len(), edges)?.with_labels(labels);
    Ok((graph, GridIndex { cell_of, vertex_of }))
}

/// Inverse of [`grid_to_graph`] given each vertex's cell and weight.
/// Adjacent cells without an edge become blocked pairs; every edge must
/// join adjacent cells with weight equal to half their sum.
pub fn graph_to_grid(g: &Graph, cells: &[(Cell, Weight)]) -> Result<GridSpec, GridError> {
    if cells.len() != g.n() {
        return Err(GridError::Format(format!("{} cells for {} vertices", cells.len(), g.n())));
    }
    let vertex_of: BTreeMap<Cell, usize> = cells.iter().enumerate().map(|(v, (c, _))| (*c, v)).collect();
    if vertex_of.len() != cells.len() {
        return Err(GridError::Format("two vertices share a cell".into()));
    }
    let two = Weight::integer(2);
    for (u, v, w) in g.edges() {
        let ((a, wa), (b, wb)) = (&cells[u], &cells[v]);
        if !adjacent(*a, *b) {
            return Err(GridError::EdgeNotAdjacent(*a, *b));
        }
        let want = (wa + wb) / two.clone();
        if *w != want {
            return Err(GridError::EdgeMismatch(*a, *b, w.clone(), want));
        }
    }
    let mut blocked = Vec::new();
    for (&c, &u) in &vertex_of {
        for nb in [(c.0 - 1, c.1), (c.0, c.1 - 1)] {
            if let Some(&v) = vertex_of.get(&nb) {
                if g.weight(u, v).is_none() {
                    blocked.push((c, nb));
                }
            }
        }
    }
    let xs = || cells.iter().map(|((x, _), _)| *x);
    let ys = || cells.iter().map(|((_, y), _)| *y);
    let (x0, x1) = (xs().min().unwrap_or(0), xs().max().unwrap_or(-1));
    let (y0, y1) = (ys().min().unwrap_or(0), ys().max().unwrap_or(-1));
    GridSpec::new(
        (x1 - x0 + 1) as usize,
        (y1 - y0 + 1) as usize,
        (x1, y1),
        cells.iter().cloned().collect(),
        blocked,
    )
}

#[derive(Serialize, Deserialize)]
struct GridFile {
    width: usize,
    height: usize,
    origin: [i64; 2],
    /// Row-major in display order; `-` marks an absent position.
    weights: Vec<Vec<String>>,
    blocked: Vec<[i64; 4]>,
}

pub fn serialize_grid(spec: &GridSpec) -> String {
    let weights = (0..spec.height as i64)
        .map(|r| {
            (0..spec.width as i64)
                .map(|c| {
                    spec.cells
                        .get(&(spec.origin.0 - c, spec.origin.1 - r))
                        .map_or_else(|| "-".to_string(), |w| w.to_string())
                })
                .collect()
        })
        .collect();
    let file = GridFile {
        width: spec.width,
        height: spec.height,
        origin: [spec.origin.0, spec.origin.1],
        weights,
        blocked: spec
            .blocked
            .iter()
            .map(|(a, b)| [a.0, a.1, b.0, b.1])
            .collect(),
    };
    toml::to_string(&file).expect("grid file serializes")
}

pub fn parse_grid(text: &str) -> Result<GridSpec, GridError> {
    let file: GridFile = toml::from_str(text).map_err(|e| GridError::Format(e.to_string()))?;
    if file.weights.len() != file.height {
        return Err(GridError::Format(format!(
            "expected {} weight rows, found {}",
            file.height,
            file.weights.len()
        )));
    }
    let origin = (file.origin[0], file.origin[1]);
    let mut cells = BTreeMap::new();
    for (r, row) in file.weights.iter().enumerate() {
        if row.len() != file.width {
            return Err(GridError::Format(format!(
                "row {r} has {} entries, expected {}",
                row.len(),
                file.width
            )));
        }
        for (c, s) in row.iter().enumerate() {
            if s.trim() == "-" {
                continue;
            }
            let w: Weight = s
                .parse()
                .map_err(|e| GridError::Format(format!("row {r} column {c}: {e}")))?;
            cells.insert((origin.0 - c as i64, origin.1 - r as i64), w);
        }
    }
    let blocked = file
        .blocked
        .iter()
        .map(|b| ((b[0], b[1]), (b[2], b[3])));
    GridSpec::new(file.width, file.height, origin, cells, blocked)
}
