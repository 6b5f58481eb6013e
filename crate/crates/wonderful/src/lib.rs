pub mod analysis;
pub mod charts;
pub mod fixtures;
pub mod graph;
pub mod homology;
pub mod lattice;
pub mod renorm;
pub mod report;

pub use graph::{parse_graph, Derived, DivergenceReport, EdgeSet, Graph, GraphError, SpanningTree};
pub use lattice::{BuildingSet, SubgraphPoset};
