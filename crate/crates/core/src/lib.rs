//! Exact-arithmetic laboratory for A* search with consistent heuristics.
//!
//! Weights, distances and heuristic values are rationals; hot loops run on
//! integers lifted to a common denominator (see [`numeric::Scale`]).

pub mod analysis;
pub mod graph;
pub mod grid;
pub mod heuristics;
pub mod instances;
pub mod numeric;
pub mod search;

pub use graph::{build_graph, parse_graph_file, serialize_graph, Graph, GraphError, ParseError};
pub use grid::{graph_to_grid, grid_to_graph, parse_grid, serialize_grid, GridIndex, GridSpec};
pub use numeric::{Quantity, Scale, Weight};
