//! Heat-kernel distributions of random walks on finite and lazily generated
//! graphs, expansion constants of the resulting measures, explicit
//! non-expansion witness constructions, and stationarity diagnostics.

#![forbid(unsafe_code)]

pub mod constructions;
pub mod error;
pub mod expansion;
pub mod graph;
pub mod heat;
pub mod measure;
pub mod stationarity;

pub use error::{HeatLabError, Result};
pub use graph::{
    load_edge_list, make_generator, Family, GeneratorSpec, Graph, GraphKind, RootedGraph,
    VertexId, DEFAULT_VERTEX_BUDGET,
};
pub use heat::{
    flattening_curve, heat_kernel, monte_carlo_kernel, uniform_ball_measure, walk_step,
    FlatteningCurve, PRNG_ALGORITHM,
};
pub use measure::{parse_ratio, total_variation, Exact, Mass, VertexMeasure};
